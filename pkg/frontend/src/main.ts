import { CatboxClient } from "./api.js";
import { App } from "./app.js";

// The console is served by the campaign service itself, so the API lives at
// the same origin.
new App(new CatboxClient("")).start();
