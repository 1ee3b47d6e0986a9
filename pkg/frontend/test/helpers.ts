import { vi } from "vitest";
import type { FindingTemplate, SummaryResponse } from "../src/api.js";

export const SAMPLE_SUMMARY: SummaryResponse = {
  severity_counts: { CRITICAL: 1, HIGH: 4, MEDIUM: 2, LOW: 3, UNKNOWN: 5 },
  collections: {
    "default-web": { HIGH: 4, MEDIUM: 2, LOW: 3 },
    "kube-system-dns": { CRITICAL: 1, UNKNOWN: 5 },
  },
};

export const SAMPLE_FINDING: FindingTemplate = {
  Type: "Kubernetes Security Check",
  ID: "KSV014",
  AVDID: "AVD-KSV-0014",
  Title: "Root file system is not read-only",
  Description: "An immutable root file system prevents applications from writing to their local disk.",
  Message: "Container should set 'securityContext.readOnlyRootFilesystem' to true",
  Resolution: "Change 'containers[].securityContext.readOnlyRootFilesystem' to 'true'.",
  Severity: "HIGH",
};

export interface FetchCall {
  url: string;
  init: RequestInit | undefined;
}

/**
 * Install a fetch mock that serves canned JSON per path prefix and records
 * every call so tests can assert on methods and URLs.
 */
export function mockFetch(routes: Record<string, unknown>): FetchCall[] {
  const calls: FetchCall[] = [];
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: string, init?: RequestInit) => {
      calls.push({ url, init });
      for (const [prefix, body] of Object.entries(routes)) {
        if (url.startsWith(prefix)) {
          return new Response(JSON.stringify(body), {
            status: 200,
            headers: { "Content-Type": "application/json" },
          });
        }
      }
      return new Response(JSON.stringify({ error: "not found" }), { status: 404 });
    })
  );
  return calls;
}

/** Resolve promises queued behind fake timers. */
export async function flush(): Promise<void> {
  for (let i = 0; i < 10; i++) {
    await Promise.resolve();
  }
}
