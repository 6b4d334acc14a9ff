/** Bootstrap: a base-URL box (the console's only configuration) and the
 * console itself once connected. */

import { ApiClient } from "./api";
import { PolicyConsole } from "./app";

const STORAGE_KEY = "moneytensor-base-url";

function defaultBaseUrl(): string {
  return (
    localStorage.getItem(STORAGE_KEY) ??
    `${window.location.protocol}//${window.location.hostname}:8080`
  );
}

export function bootstrap(root: HTMLElement): void {
  const bar = document.createElement("div");
  bar.className = "connect-bar";
  const input = document.createElement("input");
  input.type = "url";
  input.value = defaultBaseUrl();
  input.size = 40;
  const connect = document.createElement("button");
  connect.textContent = "connect";
  bar.appendChild(input);
  bar.appendChild(connect);

  const mount = document.createElement("div");
  root.appendChild(bar);
  root.appendChild(mount);

  connect.addEventListener("click", () => {
    localStorage.setItem(STORAGE_KEY, input.value);
    mount.textContent = "";
    const console_ = new PolicyConsole(mount, new ApiClient(input.value));
    void console_.init();
  });
}

const root = document.getElementById("app");
if (root) {
  bootstrap(root);
}
