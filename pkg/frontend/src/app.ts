/** Hash router wiring the three pages to the API client and auto-refresh. */

import { ApiClient } from "./api.js";
import { AutoRefresher } from "./refresh.js";
import {
  renderCollectionPage,
  renderErrorBanner,
  renderSeverityPage,
  renderSummaryPage,
  toSummaryViewModel,
} from "./views.js";

export interface AppHandles {
  refresher: AutoRefresher;
  navigate: () => Promise<void>;
  dispose: () => void;
}

export function startApp(
  root: HTMLElement,
  popup: HTMLElement,
  api: ApiClient = new ApiClient()
): AppHandles {
  let errorBanner: HTMLElement | null = null;

  const showError = (err: unknown) => {
    if (errorBanner) {
      errorBanner.remove();
    }
    errorBanner = renderErrorBanner(`Failed to refresh: ${String(err)}`);
    root.prepend(errorBanner);
  };

  const clearError = () => {
    if (errorBanner) {
      errorBanner.remove();
      errorBanner = null;
    }
  };

  const loadCurrentPage = async () => {
    const hash = window.location.hash || "#/";
    let page: HTMLElement;
    if (hash.startsWith("#/severity/")) {
      const severity = decodeURIComponent(hash.slice("#/severity/".length));
      page = renderSeverityPage(severity, await api.getVulnerabilities(severity));
    } else if (hash.startsWith("#/collection/")) {
      const name = decodeURIComponent(hash.slice("#/collection/".length));
      page = renderCollectionPage(name, await api.getCollection(name));
    } else {
      page = renderSummaryPage(toSummaryViewModel(await api.getSummary()));
    }
    clearError();
    root.replaceChildren(page);
  };

  const refresher = new AutoRefresher(loadCurrentPage, popup, showError);

  const navigate = async () => {
    // navigation restarts the cadence so a page never refreshes mid-load
    refresher.stop();
    try {
      await loadCurrentPage();
    } catch (err) {
      showError(err);
    }
    refresher.start();
  };

  const onHashChange = () => void navigate();
  window.addEventListener("hashchange", onHashChange);
  void navigate();

  return {
    refresher,
    navigate,
    dispose: () => {
      refresher.stop();
      window.removeEventListener("hashchange", onHashChange);
    },
  };
}
