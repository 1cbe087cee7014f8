import { ApiClient } from "./api.js";
import { DashboardApp } from "./app.js";

// The only configuration is the API base address: ?api=http://host:port,
// defaulting to the page's own origin.
const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "";

const root = document.getElementById("app");
if (root instanceof HTMLElement) {
  const app = new DashboardApp(root, new ApiClient(base));
  void app.init();
}
