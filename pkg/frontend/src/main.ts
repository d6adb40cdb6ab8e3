import { ApiClient } from "./api.js";
import { App } from "./app.js";

const container = document.getElementById("app");
if (!container) throw new Error("missing #app container");

const app = new App(new ApiClient(""), container);

function rerender(): void {
  void app.route(window.location.hash || "#/");
}

window.addEventListener("hashchange", rerender);
rerender();
