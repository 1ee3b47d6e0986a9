import { ApiClient } from "./api.js";
import { startApp } from "./app.js";

declare global {
  interface Window {
    SENTINEL_API_BASE?: string;
  }
}

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  const popup = document.getElementById("refresh-popup");
  if (!root || !popup) {
    throw new Error("missing #app or #refresh-popup element");
  }
  startApp(root, popup, new ApiClient(window.SENTINEL_API_BASE ?? ""));
});
