/** Read-only client for the triage API. Only GET requests ever leave here. */

export interface SummaryResponse {
  severity_counts: Record<string, number>;
  collections: Record<string, Record<string, number>>;
}

export interface FindingTemplate {
  Type: string;
  ID: string;
  AVDID: string;
  Title: string;
  Description: string;
  Message: string;
  Resolution: string;
  Severity: string;
}

export type SeverityRow = FindingTemplate & { collection_name: string };

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, { method: "GET" });
    if (!resp.ok) {
      throw new Error(`request failed: ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  getSummary(): Promise<SummaryResponse> {
    return this.get<SummaryResponse>("/api/summary");
  }

  getVulnerabilities(severity: string): Promise<SeverityRow[]> {
    return this.get<SeverityRow[]>(`/api/vulnerabilities/${encodeURIComponent(severity)}`);
  }

  getCollection(name: string): Promise<FindingTemplate[]> {
    return this.get<FindingTemplate[]>(`/api/collections/${encodeURIComponent(name)}`);
  }
}
