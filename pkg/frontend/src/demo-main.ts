/** Demo page bootstrap: one subscriber, one evaluate, gates from the token. */

import { ApiClient } from "./api.js";
import { DemoPage } from "./demo.js";
import { renderDemo } from "./render.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app");

const params = new URLSearchParams(location.search);
const plan = params.get("plan") ?? "GOLD";
const addOns = params.getAll("addon");
const subscriberId = params.get("sub") ?? `demo-${plan.toLowerCase()}`;

const api = new ApiClient({ baseUrl: "" });
const page = new DemoPage(api, subscriberId);

function paint(): void {
  renderDemo(root as HTMLElement, page.state, {
    onAddPet: () => void page.addPet().then(paint),
    onBookVisit: () => void page.bookVisit("first-pet").then(paint),
  });
}

void page.init(plan, addOns).then(paint);
// silent re-evaluate when the token ages out
setInterval(() => void page.ensureFresh().then(paint), 30_000);
