import { TutorApi } from "./api.js";
import { PilotFlow } from "./flow.js";
import { App } from "./ui.js";

// The service base URL is the only configuration: ?api=http://host:port,
// falling back to same-origin.
const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? window.location.origin;

const api = new TutorApi(baseUrl);
const flow = new PilotFlow(api);
const app = new App(document.getElementById("app")!, flow);

// A session id in the hash means the student reloaded mid-flow: restore the
// server's view of the session instead of starting over.
const resumeId = window.location.hash.slice(1);

(async () => {
  if (resumeId) {
    await flow.resume(resumeId);
  }
  app.render();

  // Keep the hash pointing at the active session so reloads resume it.
  const tick = () => {
    const session = flow.view().session;
    if (session && window.location.hash.slice(1) !== session.session_id) {
      window.location.hash = session.session_id;
    }
    requestAnimationFrame(tick);
  };
  requestAnimationFrame(tick);
})();
