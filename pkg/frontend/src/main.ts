import { ServiceClient } from "./api.js";
import { SessionFlow } from "./flow.js";
import { mount } from "./view.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8000";
const userId = params.get("user") ?? "demo-user";

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app element");

const flow = new SessionFlow(new ServiceClient(baseUrl), userId);
mount(root, flow);
void flow.start();
