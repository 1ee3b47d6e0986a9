/** Table rendering for the three dashboard pages. */

import { FindingTemplate, SeverityRow, SummaryResponse } from "./api.js";

export const SEVERITY_ORDER = ["CRITICAL", "HIGH", "MEDIUM", "LOW", "UNKNOWN"];

export interface SummaryViewModel {
  severityRows: { severity: string; count: number }[];
  collectionRows: { name: string; high: number; medium: number; low: number }[];
}

export function toSummaryViewModel(summary: SummaryResponse): SummaryViewModel {
  const severityRows = Object.entries(summary.severity_counts)
    .map(([severity, count]) => ({ severity, count }))
    .sort(
      (a, b) => SEVERITY_ORDER.indexOf(a.severity) - SEVERITY_ORDER.indexOf(b.severity)
    );
  const collectionRows = Object.entries(summary.collections)
    .map(([name, severities]) => ({
      name,
      high: severities["HIGH"] ?? 0,
      medium: severities["MEDIUM"] ?? 0,
      low: severities["LOW"] ?? 0,
    }))
    .sort((a, b) => a.name.localeCompare(b.name));
  return { severityRows, collectionRows };
}

export const SEVERITY_PAGE_COLUMNS = [
  "Collection Name",
  "Severity",
  "Title",
  "AVDID",
  "Description",
  "Message",
  "Resolution",
];

export const COLLECTION_PAGE_COLUMNS = [
  "AVDID",
  "Description",
  "ID",
  "Message",
  "Resolution",
  "Severity",
  "Title",
  "Type",
];

const SEVERITY_CLASS: Record<string, string> = {
  CRITICAL: "sev-critical",
  HIGH: "sev-high",
  MEDIUM: "sev-medium",
  LOW: "sev-low",
  UNKNOWN: "sev-unknown",
};

function table(columns: string[], rows: string[][]): HTMLTableElement {
  const el = document.createElement("table");
  const thead = el.createTHead();
  const headRow = thead.insertRow();
  for (const column of columns) {
    const th = document.createElement("th");
    th.textContent = column;
    headRow.appendChild(th);
  }
  const tbody = el.createTBody();
  for (const row of rows) {
    const tr = tbody.insertRow();
    for (const cell of row) {
      const td = tr.insertCell();
      td.textContent = cell;
    }
  }
  return el;
}

export function renderSummaryPage(model: SummaryViewModel): HTMLElement {
  const page = document.createElement("div");

  const heading = document.createElement("h2");
  heading.textContent = "Current Vulnerabilities";
  page.appendChild(heading);

  const severityTable = table(
    ["Severity", "Number of Vulnerabilities"],
    model.severityRows.map((r) => [r.severity, String(r.count)])
  );
  severityTable.id = "severity-table";
  // severity names link to the drill-down page
  severityTable.querySelectorAll<HTMLTableRowElement>("tbody tr").forEach((tr, i) => {
    const cell = tr.cells[0];
    const severity = model.severityRows[i].severity;
    cell.textContent = "";
    const link = document.createElement("a");
    link.href = `#/severity/${severity}`;
    link.textContent = severity;
    link.className = SEVERITY_CLASS[severity] ?? "sev-unknown";
    cell.appendChild(link);
  });
  page.appendChild(severityTable);

  const subheading = document.createElement("h2");
  subheading.textContent = "Collection-wise Vulnerabilities";
  page.appendChild(subheading);

  const collectionTable = table(
    ["Collection Name", "High", "Medium", "Low"],
    model.collectionRows.map((r) => [r.name, String(r.high), String(r.medium), String(r.low)])
  );
  collectionTable.id = "collection-table";
  collectionTable.querySelectorAll<HTMLTableRowElement>("tbody tr").forEach((tr, i) => {
    const cell = tr.cells[0];
    const name = model.collectionRows[i].name;
    cell.textContent = "";
    const link = document.createElement("a");
    link.href = `#/collection/${encodeURIComponent(name)}`;
    link.textContent = name;
    cell.appendChild(link);
  });
  page.appendChild(collectionTable);
  return page;
}

function backButton(): HTMLButtonElement {
  const button = document.createElement("button");
  button.className = "back-button";
  button.textContent = "Back";
  button.addEventListener("click", () => history.back());
  return button;
}

export function renderSeverityPage(severity: string, rows: SeverityRow[]): HTMLElement {
  const page = document.createElement("div");
  page.appendChild(backButton());
  const heading = document.createElement("h2");
  heading.textContent = `${severity} Vulnerabilities`;
  page.appendChild(heading);
  page.appendChild(
    table(
      SEVERITY_PAGE_COLUMNS,
      rows.map((r) => [
        r.collection_name,
        r.Severity,
        r.Title,
        r.AVDID,
        r.Description,
        r.Message,
        r.Resolution,
      ])
    )
  );
  return page;
}

export function renderCollectionPage(name: string, rows: FindingTemplate[]): HTMLElement {
  const page = document.createElement("div");
  page.appendChild(backButton());
  const heading = document.createElement("h2");
  heading.textContent = name;
  page.appendChild(heading);
  page.appendChild(
    table(
      COLLECTION_PAGE_COLUMNS,
      rows.map((r) => [
        r.AVDID,
        r.Description,
        r.ID,
        r.Message,
        r.Resolution,
        r.Severity,
        r.Title,
        r.Type,
      ])
    )
  );
  return page;
}

export function renderErrorBanner(message: string): HTMLElement {
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = message;
  return banner;
}
