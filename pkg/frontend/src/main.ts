import { ApiError, ReviewApi } from "./api.js";
import { keyToAction, type KeyAction } from "./keyboard.js";
import { renderApp } from "./render.js";
import { ReviewSession } from "./session.js";
import type { ProgressResponse } from "./types.js";

interface AppConfig {
  baseUrl: string;
  taxonomy: string | null;
  reviewer: string;
  k: number | undefined;
  radius: number | undefined;
}

function configFromLocation(): AppConfig {
  const params = new URLSearchParams(window.location.search);
  const k = params.get("k");
  const radius = params.get("radius");
  return {
    baseUrl: params.get("api") ?? "",
    taxonomy: params.get("taxonomy"),
    reviewer: params.get("reviewer") ?? "reviewer",
    k: k ? Number(k) : undefined,
    radius: radius ? Number(radius) : undefined,
  };
}

export class App {
  private progress: ProgressResponse | null = null;
  private error: string | null = null;
  private lastFailed: (() => Promise<void>) | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ReviewApi,
    private readonly session: ReviewSession,
  ) {}

  render(): void {
    this.root.innerHTML = renderApp({
      session: this.session,
      progress: this.progress,
      error: this.error,
    });
  }

  private async guard(work: () => Promise<void>): Promise<void> {
    try {
      this.error = null;
      await work();
    } catch (err) {
      this.lastFailed = work;
      this.error = err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
    }
    this.render();
  }

  async loadCurrent(): Promise<void> {
    await this.guard(async () => {
      const response = await this.api.suggestions(
        this.session.artifact.id,
        this.session.taxonomy,
        this.session.k,
        this.session.radius,
      );
      this.session.setSuggestions(response);
      this.progress = await this.api.progress();
    });
  }

  async save(): Promise<void> {
    if (!this.session.canSave) return;
    await this.guard(async () => {
      await this.api.submitAnnotation(this.session.annotationBody());
      this.session.markSaved();
      this.session.next(true);
      await this.loadCurrent();
    });
  }

  async navigate(direction: "next" | "prev"): Promise<void> {
    const result = direction === "next" ? this.session.next() : this.session.prev();
    if (result.blocked) {
      const leave = window.confirm("Discard unsaved decisions?");
      if (!leave) {
        this.render();
        return;
      }
      if (direction === "next") this.session.next(true);
      else this.session.prev(true);
    }
    if (result.moved || result.blocked) await this.loadCurrent();
    else this.render();
  }

  async dispatch(action: KeyAction): Promise<void> {
    switch (action) {
      case "focus-next":
        this.session.focusNext();
        this.render();
        break;
      case "focus-prev":
        this.session.focusPrev();
        this.render();
        break;
      case "toggle-accept":
        this.session.toggleFocused("accepted");
        this.render();
        break;
      case "toggle-reject":
        this.session.toggleFocused("rejected");
        this.render();
        break;
      case "next-artifact":
        await this.navigate("next");
        break;
      case "prev-artifact":
        await this.navigate("prev");
        break;
      case "save":
        await this.save();
        break;
    }
  }

  async handleClick(target: HTMLElement): Promise<void> {
    const button = target.closest<HTMLElement>("[data-action]");
    if (!button) return;
    const action = button.dataset.action;
    const nodeId = button.dataset.nodeId;
    if (action === "accept" && nodeId) {
      this.session.toggle(nodeId, "accepted");
      this.render();
    } else if (action === "reject" && nodeId) {
      this.session.toggle(nodeId, "rejected");
      this.render();
    } else if (action === "expand" && nodeId) {
      const list = this.root.querySelector(`[data-neighbors-for="${CSS.escape(nodeId)}"]`);
      if (list instanceof HTMLElement) list.hidden = !list.hidden;
    } else if (action === "next") {
      await this.navigate("next");
    } else if (action === "prev") {
      await this.navigate("prev");
    } else if (action === "save") {
      await this.save();
    } else if (action === "retry" && this.lastFailed) {
      const work = this.lastFailed;
      await this.guard(work);
    }
  }

  attach(): void {
    this.root.addEventListener("click", (event) => {
      void this.handleClick(event.target as HTMLElement);
    });
    document.addEventListener("keydown", (event) => {
      if (event.target instanceof HTMLInputElement) return;
      const action = keyToAction(event.key);
      if (action) {
        event.preventDefault();
        void this.dispatch(action);
      }
    });
  }
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const config = configFromLocation();
  const api = new ReviewApi(config.baseUrl);
  const taxonomy = config.taxonomy ?? (await api.taxonomies())[0];
  if (!taxonomy) {
    root.textContent = "service has no taxonomies loaded";
    return;
  }
  const artifacts = await api.artifacts();
  const session = new ReviewSession(artifacts, {
    taxonomy,
    reviewer: config.reviewer,
    k: config.k,
    radius: config.radius,
  });
  const app = new App(root, api, session);
  app.attach();
  await app.loadCurrent();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot();
}
