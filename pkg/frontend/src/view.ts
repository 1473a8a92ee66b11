/**
 * DOM rendering: one render pass per state change, everything derived from
 * the flow's state. Posterior numbers are printed exactly as the service
 * reported them.
 */

import type { SessionFlow } from "./flow.js";
import { ACTIVITIES, RESPONSE_OPTIONS, SOCIAL_OPTIONS } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

export function render(root: HTMLElement, flow: SessionFlow): void {
  const doc = root.ownerDocument;
  root.textContent = "";

  if (flow.banner !== null) {
    const banner = el(doc, "div", { class: "banner", role: "alert" }, flow.banner);
    root.appendChild(banner);
  }

  switch (flow.screen) {
    case "activity_grid":
      root.appendChild(renderActivityGrid(doc, flow));
      break;
    case "social_choice":
      root.appendChild(renderSocialChoice(doc, flow));
      break;
    case "prompt":
      root.appendChild(renderPrompt(doc, flow));
      break;
    case "dashboard":
      root.appendChild(renderDashboard(doc, flow));
      break;
  }
}

function renderActivityGrid(doc: Document, flow: SessionFlow): HTMLElement {
  const section = el(doc, "section", { id: "activity-grid" });
  section.appendChild(el(doc, "h2", {}, "What are you doing right now?"));
  const grid = el(doc, "div", { class: "grid" });
  for (const activity of ACTIVITIES) {
    const tile = el(
      doc,
      "button",
      { class: "tile", "data-activity": activity.id },
      activity.label,
    );
    tile.addEventListener("click", () => flow.selectActivity(activity.id));
    grid.appendChild(tile);
  }
  section.appendChild(grid);
  return section;
}

function renderSocialChoice(doc: Document, flow: SessionFlow): HTMLElement {
  const section = el(doc, "section", { id: "social-choice" });
  section.appendChild(el(doc, "h2", {}, "Who is with you?"));
  for (const option of SOCIAL_OPTIONS) {
    const button = el(
      doc,
      "button",
      { class: "social", "data-social": option.id, ...(flow.busy ? { disabled: "" } : {}) },
      option.label,
    );
    button.addEventListener("click", () => void flow.confirmSocial(option.id));
    section.appendChild(button);
  }
  return section;
}

function renderPrompt(doc: Document, flow: SessionFlow): HTMLElement {
  const section = el(doc, "section", { id: "prompt" });
  const suggestion = flow.suggestion;
  if (suggestion === null) return section;
  section.appendChild(el(doc, "h2", { id: "intervention-name" }, suggestion.name));
  section.appendChild(el(doc, "p", { id: "prompt-text" }, suggestion.prompt));
  for (const option of RESPONSE_OPTIONS) {
    const button = el(
      doc,
      "button",
      { class: "response", "data-response": option.id, ...(flow.busy ? { disabled: "" } : {}) },
      option.label,
    );
    button.addEventListener("click", () => void flow.respond(option.id));
    section.appendChild(button);
  }
  return section;
}

function renderDashboard(doc: Document, flow: SessionFlow): HTMLElement {
  const section = el(doc, "section", { id: "dashboard" });
  const dashboard = flow.dashboard;
  if (dashboard === null) return section;
  section.appendChild(el(doc, "h2", {}, `Learning so far: ${dashboard.context}`));
  if (dashboard.last_ack !== null) {
    section.appendChild(
      el(
        doc,
        "p",
        { id: "last-ack" },
        `Recorded reward ${dashboard.last_ack.reward} for ${dashboard.last_ack.intervention_id}; ` +
          `posterior mean now ${dashboard.last_ack.posterior_mean}`,
      ),
    );
  }
  section.appendChild(
    el(doc, "p", { id: "decision-count" }, `Suggestions made in this context: ${dashboard.decision_count}`),
  );
  const table = el(doc, "table", { id: "arm-table" });
  const head = el(doc, "tr");
  for (const title of ["Intervention", "Posterior mean", "alpha", "beta"]) {
    head.appendChild(el(doc, "th", {}, title));
  }
  table.appendChild(head);
  for (const arm of dashboard.arms) {
    const row = el(doc, "tr", { "data-arm": arm.id });
    row.appendChild(el(doc, "td", {}, arm.name));
    row.appendChild(el(doc, "td", { class: "mean" }, String(arm.mean)));
    row.appendChild(el(doc, "td", {}, String(arm.alpha)));
    row.appendChild(el(doc, "td", {}, String(arm.beta)));
    table.appendChild(row);
  }
  section.appendChild(table);
  const next = el(doc, "button", { id: "next-check-in" }, "Next check-in");
  next.addEventListener("click", () => flow.nextCheckIn());
  section.appendChild(next);
  return section;
}

/** Wire a flow to a root element: render now and after every change. */
export function mount(root: HTMLElement, flow: SessionFlow): void {
  flow.onChange(() => render(root, flow));
  render(root, flow);
}
