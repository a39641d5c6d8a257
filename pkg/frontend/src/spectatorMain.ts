/** Read-only spectator page: everyone's position plus the recent hint log. */

import { ApiClient } from "./api.js";
import { SpectatorModel } from "./spectator.js";
import { el } from "./ui.js";
import type { SpectatorSnapshot } from "./types.js";

const params = new URLSearchParams(location.search);
const sessionId = params.get("session") ?? "team1";
const api = new ApiClient(location.origin);

const usersHost = document.getElementById("spectator-users")!;
const hintsHost = document.getElementById("spectator-hints")!;
const revisionHost = document.getElementById("spectator-revision")!;
document.getElementById("spectator-session")!.textContent = sessionId;

function render(snapshot: SpectatorSnapshot): void {
  revisionHost.textContent = `revision ${snapshot.revision}`;
  usersHost.replaceChildren();
  const users = Object.entries(snapshot.users);
  if (users.length === 0) usersHost.append(el("p", {}, "nobody here yet"));
  for (const [user, info] of users) {
    usersHost.append(
      el(
        "div",
        { class: "spectator-user" },
        el("strong", {}, user),
        ` (${info.role}) — `,
        info.map === null ? "not on a map" : `${info.map} · cell ${info.cell}`,
      ),
    );
  }
  hintsHost.replaceChildren();
  for (const hint of [...snapshot.hints].reverse()) {
    hintsHost.append(
      el(
        "div",
        { class: "spectator-hint" },
        el("strong", {}, hint.user),
        `${hint.to ? ` → ${hint.to}` : ""}: ${hint.video}/${hint.shot} — ${hint.note}`,
      ),
    );
  }
}

const model = new SpectatorModel(render);

async function poll(): Promise<void> {
  try {
    model.offer(await api.spectator(sessionId));
  } catch {
    revisionHost.textContent = "server unreachable";
  }
}

void poll();
setInterval(() => void poll(), 700);
