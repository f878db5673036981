/** Editor page bootstrap. The admin token is asked for once and kept
 * in sessionStorage; the server rejects a wrong one with 401. */

import { ApiClient } from "./api.js";
import { PricingEditor } from "./editor.js";
import { renderEditor } from "./render.js";
import type { Change } from "./api.js";
import type { SubmitOutcome } from "./editor.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app");

let adminToken = sessionStorage.getItem("adminToken") ?? "";
if (!adminToken) {
  adminToken = prompt("Admin bearer token") ?? "";
  sessionStorage.setItem("adminToken", adminToken);
}

const api = new ApiClient({ baseUrl: "", adminToken });
const editor = new PricingEditor(api);

let preview: Change[] | null = null;
let outcome: SubmitOutcome | null = null;

function paint(): void {
  if (!editor.draft) return;
  renderEditor(
    root as HTMLElement,
    { draft: editor.draft, preview, outcome },
    {
      onPrice: (plan, value) => {
        editor.draft?.setPlanPrice(plan, value);
        paint();
      },
      onLimit: (plan, limit, value) => {
        editor.draft?.setPlanLimit(plan, limit, value);
        paint();
      },
      onFeature: (plan, feature, value) => {
        editor.draft?.setPlanFeature(plan, feature, value);
        paint();
      },
      onPreview: () => {
        void editor.previewDiff().then((changes) => {
          preview = changes;
          paint();
        });
      },
      onSubmit: () => {
        void editor.submit().then((result) => {
          outcome = result;
          preview = null;
          paint();
        });
      },
    },
  );
}

void editor.load().then(paint);
