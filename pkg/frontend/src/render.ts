/**
 * DOM renderers. Both pages re-render whole sections from state
 * objects; there is no retained view state that could drift from the
 * verified source.
 */

import type { Change, Violation } from "./api.js";
import type { UiState } from "./gates.js";
import { UI_FEATURES } from "./gates.js";
import type { PricingDraft } from "./draft.js";
import type { SubmitOutcome } from "./editor.js";

type Child = Node | string;

function el(tag: string, attrs: Record<string, string> = {}, ...children: Child[]): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

export function demoBanner(): HTMLElement {
  return el(
    "div",
    { class: "banner" },
    "Demo trust model: this page fetched the token signing key from " +
      "/demo/key and verifies tokens locally. Anyone with that key can " +
      "mint tokens, so this setup is for demos only; production clients " +
      "treat tokens as opaque and let the server verify.",
  );
}

export interface DemoHandlers {
  onAddPet: () => void;
  onBookVisit: () => void;
}

export function renderDemo(root: HTMLElement, state: UiState, handlers: DemoHandlers): void {
  root.replaceChildren();
  root.append(demoBanner());

  if (!state.authorized) {
    root.append(el("p", { class: "muted" }, "No valid feature token. Nothing to show."));
    return;
  }

  const head = el(
    "p",
    {},
    el("strong", {}, state.plan ?? "?"),
    state.addOns.length > 0 ? ` + ${state.addOns.join(", ")}` : "",
    state.supportPriority ? ` · support: ${state.supportPriority}` : "",
    ` · pricing v${state.pricingVersion}`,
  );
  root.append(head);

  const grid = el("div", { class: "grid" });
  for (const name of UI_FEATURES) {
    if (!state.features[name]) continue;
    grid.append(el("section", { class: "card", "data-feature": name }, el("h3", {}, name)));
  }
  root.append(grid);

  const pets = el("section", { class: "card counters" }, el("h3", {}, "your pets"));
  pets.append(
    el("p", {}, `registered: ${state.addPet.used ?? "?"} of ${state.addPet.max ?? "?"}`),
  );
  if (state.addPet.visible) {
    const button = el("button", { id: "add-pet" }, "Add new pet");
    button.addEventListener("click", handlers.onAddPet);
    pets.append(button);
  } else if (state.addPet.limitReached) {
    pets.append(el("p", { class: "notice" }, "limit reached"));
  }

  const visits = el("section", { class: "card counters" }, el("h3", {}, "visits"));
  visits.append(
    el("p", {}, `booked: ${state.bookVisit.used ?? "?"} of ${state.bookVisit.max ?? "?"}`),
  );
  if (state.bookVisit.visible) {
    const button = el("button", { id: "book-visit" }, "Book a visit");
    button.addEventListener("click", handlers.onBookVisit);
    visits.append(button);
  } else if (state.bookVisit.limitReached) {
    visits.append(el("p", { class: "notice" }, "limit reached"));
  }

  root.append(pets, visits);
}

export interface EditorHandlers {
  onPrice: (plan: string, value: number) => void;
  onLimit: (plan: string, limit: string, value: number) => void;
  onFeature: (plan: string, feature: string, value: boolean) => void;
  onPreview: () => void;
  onSubmit: () => void;
}

export interface EditorView {
  draft: PricingDraft;
  preview: Change[] | null;
  outcome: SubmitOutcome | null;
}

function changeRow(change: Change): HTMLElement {
  return el(
    "tr",
    { class: change.impact === "SAFE" ? "" : "warn" },
    el("td", {}, change.kind),
    el("td", {}, change.path),
    el("td", {}, JSON.stringify(change.old)),
    el("td", {}, JSON.stringify(change.new)),
    el("td", {}, change.impact),
  );
}

function violationList(violations: Violation[]): HTMLElement {
  const list = el("ul", { class: "violations" });
  for (const violation of violations) {
    list.append(el("li", {}, `${violation.kind} at ${violation.path}: ${violation.message}`));
  }
  return list;
}

export function renderEditor(root: HTMLElement, view: EditorView, handlers: EditorHandlers): void {
  root.replaceChildren();
  const document_ = view.draft.document();

  for (const plan of document_.plans) {
    const card = el("section", { class: "card" }, el("h3", {}, plan.name));

    const price = el("input", {
      type: "number",
      step: "0.01",
      value: String(plan.monthlyPrice ?? 0),
    }) as HTMLInputElement;
    price.addEventListener("change", () => handlers.onPrice(plan.name, Number(price.value)));
    card.append(el("label", {}, "monthly price ", price));

    for (const [limitName, value] of Object.entries(plan.limitValues ?? {})) {
      const input = el("input", { type: "number", value: String(value) }) as HTMLInputElement;
      input.addEventListener("change", () =>
        handlers.onLimit(plan.name, limitName, Number(input.value)),
      );
      card.append(el("label", {}, `${limitName} `, input));
    }

    for (const feature of document_.features) {
      if ((feature.valueType ?? "BOOLEAN") !== "BOOLEAN") continue;
      const checked = plan.featureValues?.[feature.name] === true;
      const box = el("input", { type: "checkbox" }) as HTMLInputElement;
      box.checked = checked;
      box.addEventListener("change", () =>
        handlers.onFeature(plan.name, feature.name, box.checked),
      );
      card.append(el("label", { class: "feature" }, box, ` ${feature.name}`));
    }
    root.append(card);
  }

  const problems = view.draft.validation();
  if (problems.length > 0) root.append(violationList(problems));

  const preview = el("button", { id: "preview" }, "Preview diff");
  preview.addEventListener("click", handlers.onPreview);
  const submit = el("button", { id: "submit" }, "Publish") as HTMLButtonElement;
  submit.disabled = !view.draft.canSubmit();
  submit.addEventListener("click", handlers.onSubmit);
  root.append(el("div", { class: "actions" }, preview, submit));

  if (view.preview !== null) {
    const table = el("table", { class: "changes" });
    if (view.preview.length === 0) {
      root.append(el("p", { class: "muted" }, "No changes."));
    } else {
      view.preview.forEach((change) => table.append(changeRow(change)));
      root.append(table);
    }
  }

  if (view.outcome !== null) {
    if (view.outcome.ok) {
      root.append(
        el("p", { class: "ok" }, `Published version ${view.outcome.version} `),
      );
    } else if (view.outcome.kind === "invalid") {
      root.append(violationList(view.outcome.violations));
    } else {
      root.append(el("p", { class: "notice" }, view.outcome.message));
    }
  }
}
