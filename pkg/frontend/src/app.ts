/** DOM wiring for the console: space builder, campaign page, 2 s polling. */

import { ApiError, CatboxClient, type PointDoc, type SpaceDoc } from "./api.js";
import { decisionPathSvg, incumbentChartSvg } from "./charts.js";
import { buildCampaignView, spaceFormValid, validateSpaceForm } from "./model.js";

const POLL_MS = 2000;

interface BuilderRow {
  kind: "cat" | "con";
  name: string;
  levels: string; // comma-separated, categorical only
  lower: string;
  upper: string;
}

export class App {
  private rows: BuilderRow[] = [];
  private pollTimer: number | null = null;
  private paused = false;
  private root: HTMLElement;

  constructor(private client: CatboxClient, rootEl?: HTMLElement) {
    this.root = rootEl ?? document.getElementById("app")!;
  }

  start(): void {
    window.addEventListener("hashchange", () => this.route());
    this.route();
  }

  private route(): void {
    this.stopPolling();
    const hash = window.location.hash;
    const match = hash.match(/^#\/campaign\/([0-9a-f]{32})$/);
    if (match) {
      void this.renderCampaignPage(match[1]);
    } else {
      void this.renderHome();
    }
  }

  private stopPolling(): void {
    if (this.pollTimer !== null) {
      window.clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  // ---- home: campaign list + space builder

  private async renderHome(): Promise<void> {
    if (this.rows.length === 0) {
      this.rows = [
        { kind: "cat", name: "catalyst", levels: "A, B, C", lower: "", upper: "" },
        { kind: "con", name: "temperature", levels: "", lower: "500", upper: "900" },
      ];
    }
    let ids: string[] = [];
    try {
      ids = await this.client.listCampaigns();
    } catch {
      // service unreachable; the builder still renders
    }
    this.root.innerHTML = `
      <h1>catbox console</h1>
      <section>
        <h2>campaigns</h2>
        <ul id="campaign-list">${ids
          .map((id) => `<li><a href="#/campaign/${id}"><code>${id.slice(0, 12)}...</code></a></li>`)
          .join("") || "<li><em>none yet</em></li>"}</ul>
      </section>
      <section>
        <h2>new campaign</h2>
        <div id="builder"></div>
        <div class="row-buttons">
          <button id="add-cat">+ categorical</button>
          <button id="add-con">+ continuous</button>
        </div>
        <label>direction
          <select id="direction"><option>maximize</option><option>minimize</option></select>
        </label>
        <label>initial design size <input id="n-init" type="number" value="20" min="1"></label>
        <div id="form-error" class="error"></div>
        <button id="create" class="primary">create campaign</button>
      </section>`;
    this.renderBuilderRows();
    this.byId("add-cat").onclick = () => {
      this.rows.push({ kind: "cat", name: "", levels: "", lower: "", upper: "" });
      this.renderBuilderRows();
    };
    this.byId("add-con").onclick = () => {
      this.rows.push({ kind: "con", name: "", levels: "", lower: "", upper: "" });
      this.renderBuilderRows();
    };
    this.byId("create").onclick = () => void this.submitSpace();
  }

  private builderSpace(): SpaceDoc {
    return {
      categoricals: this.rows
        .filter((r) => r.kind === "cat")
        .map((r) => ({
          name: r.name.trim(),
          levels: r.levels.split(",").map((s) => s.trim()).filter((s) => s.length > 0),
        })),
      continuous: this.rows
        .filter((r) => r.kind === "con")
        .map((r) => ({ name: r.name.trim(), lower: Number(r.lower), upper: Number(r.upper) })),
    };
  }

  private renderBuilderRows(): void {
    const builder = this.byId("builder");
    const space = this.builderSpace();
    const errors = validateSpaceForm(space);
    let catIndex = -1;
    let conIndex = -1;
    builder.innerHTML = this.rows
      .map((row, i) => {
        if (row.kind === "cat") {
          catIndex += 1;
          const key = `cat-${catIndex}`;
          return `<div class="var-row" data-i="${i}">
            <span class="badge">cat</span>
            <input data-field="name" placeholder="name" value="${escapeAttr(row.name)}">
            <input data-field="levels" placeholder="levels, comma separated" value="${escapeAttr(row.levels)}">
            <button data-remove="${i}" title="remove">x</button>
            <span class="error">${errors.fieldErrors.get(`${key}-name`) ?? errors.fieldErrors.get(`${key}-levels`) ?? ""}</span>
          </div>`;
        }
        conIndex += 1;
        const key = `con-${conIndex}`;
        return `<div class="var-row" data-i="${i}">
          <span class="badge">con</span>
          <input data-field="name" placeholder="name" value="${escapeAttr(row.name)}">
          <input data-field="lower" placeholder="lower" value="${escapeAttr(row.lower)}" size="8">
          <input data-field="upper" placeholder="upper" value="${escapeAttr(row.upper)}" size="8">
          <button data-remove="${i}" title="remove">x</button>
          <span class="error">${errors.fieldErrors.get(`${key}-name`) ?? errors.fieldErrors.get(`${key}-bounds`) ?? ""}</span>
        </div>`;
      })
      .join("");
    builder.querySelectorAll<HTMLInputElement>("input[data-field]").forEach((input) => {
      input.onchange = () => {
        const rowEl = input.closest<HTMLElement>(".var-row")!;
        const row = this.rows[Number(rowEl.dataset.i)];
        (row as unknown as Record<string, string>)[input.dataset.field!] = input.value;
        this.renderBuilderRows();
      };
    });
    builder.querySelectorAll<HTMLButtonElement>("button[data-remove]").forEach((btn) => {
      btn.onclick = () => {
        this.rows.splice(Number(btn.dataset.remove), 1);
        this.renderBuilderRows();
      };
    });
    const create = document.getElementById("create") as HTMLButtonElement | null;
    if (create) create.disabled = !spaceFormValid(errors);
    const formError = document.getElementById("form-error");
    if (formError) formError.textContent = errors.formError ?? "";
  }

  private async submitSpace(): Promise<void> {
    const space = this.builderSpace();
    const errors = validateSpaceForm(space);
    if (!spaceFormValid(errors)) return; // client validation mirrors the server
    const direction = (this.byId("direction") as HTMLSelectElement).value;
    const nInit = Number((this.byId("n-init") as HTMLInputElement).value) || 20;
    try {
      const created = await this.client.createCampaign(space, { direction, n_init: nInit });
      window.location.hash = `#/campaign/${created.id}`;
    } catch (err) {
      this.byId("form-error").textContent = err instanceof ApiError ? err.detail : String(err);
    }
  }

  // ---- campaign page

  private async renderCampaignPage(id: string): Promise<void> {
    this.root.innerHTML = `
      <p><a href="#/">&larr; all campaigns</a></p>
      <h1>campaign <code>${id.slice(0, 12)}...</code></h1>
      <div class="cards">
        <div class="card"><h3>space</h3><div id="space-summary"></div></div>
        <div class="card"><h3>incumbent</h3><div id="incumbent-card"><em>none yet</em></div></div>
        <div class="card"><h3>next suggestion</h3><div id="pending-card"></div></div>
        <div class="card"><h3>controls</h3>
          <label>acquisition
            <select id="acq-kind"><option>ei</option><option>ucb</option><option>pi</option></select>
          </label>
          <button id="pause">pause polling</button>
        </div>
      </div>
      <div id="toast" class="toast hidden"></div>
      <section><h2>incumbent over iterations</h2><div id="incumbent-chart"></div></section>
      <section id="decision-section"><h2>categorical decision path</h2><div id="decision-chart"></div></section>
      <section>
        <h2>initial design checklist</h2>
        <div id="initial-list"></div>
      </section>
      <section>
        <h2>manual observation</h2>
        <form id="manual-form">
          <input id="manual-point" placeholder='point JSON, e.g. {"cat":[0],"con":[700]}' size="44">
          <input id="manual-y" placeholder="measured y" size="10">
          <button type="submit">tell</button>
        </form>
      </section>
      <section>
        <h2>history <a id="export-link" href="${this.client.exportUrl(id)}" download>export CSV</a></h2>
        <table id="history-table">
          <thead><tr><th>#</th><th>point</th><th>y</th><th>tag</th></tr></thead>
          <tbody></tbody>
        </table>
      </section>`;

    this.byId("pause").onclick = () => {
      this.paused = !this.paused;
      this.byId("pause").textContent = this.paused ? "resume polling" : "pause polling";
    };
    (this.byId("acq-kind") as HTMLSelectElement).onchange = async (ev) => {
      const kind = (ev.target as HTMLSelectElement).value;
      try {
        await this.client.patchConfig(id, { acq: kind });
        await this.refresh(id);
      } catch (err) {
        this.showToast(err);
      }
    };
    (this.byId("manual-form") as HTMLFormElement).onsubmit = async (ev) => {
      ev.preventDefault();
      try {
        const point = JSON.parse((this.byId("manual-point") as HTMLInputElement).value) as PointDoc;
        const y = Number((this.byId("manual-y") as HTMLInputElement).value);
        if (!Number.isFinite(y)) throw new Error("y must be a finite number");
        await this.client.tell(id, point, y);
        await this.refresh(id);
      } catch (err) {
        this.showToast(err);
      }
    };

    await this.refresh(id);
    this.pollTimer = window.setInterval(() => {
      if (!this.paused) void this.refresh(id);
    }, POLL_MS);
  }

  /** Fetch the document and re-render every dynamic region. */
  async refresh(id: string): Promise<void> {
    let doc;
    try {
      doc = await this.client.getCampaign(id);
    } catch (err) {
      this.showToast(err);
      return;
    }
    const view = buildCampaignView(doc);
    this.byId("space-summary").textContent = view.spaceSummary;

    const incumbentCard = this.byId("incumbent-card");
    incumbentCard.innerHTML = view.incumbent
      ? `<div class="big">${view.incumbent.y}</div><div>${escapeHtml(view.incumbent.label)}</div>`
      : "<em>none yet</em>";

    const pendingCard = this.byId("pending-card");
    if (view.pending) {
      pendingCard.innerHTML = `
        <div>${escapeHtml(view.pending.label)}</div>
        <form id="pending-form">
          <input id="pending-y" placeholder="measured y" size="10">
          <button type="submit">tell result</button>
        </form>`;
      (this.byId("pending-form") as HTMLFormElement).onsubmit = async (ev) => {
        ev.preventDefault();
        const y = Number((this.byId("pending-y") as HTMLInputElement).value);
        if (!Number.isFinite(y)) {
          this.showToast(new Error("y must be a finite number"));
          return;
        }
        try {
          await this.client.tell(id, view.pending!.point, y);
          await this.client.suggest(id); // auto-refresh the next suggestion
          await this.refresh(id);
        } catch (err) {
          this.showToast(err);
        }
      };
    } else if (view.remainingInitial.length > 0) {
      pendingCard.innerHTML = `<em>finish the initial design first (${view.remainingInitial.length} left)</em>`;
    } else {
      pendingCard.innerHTML = `<button id="ask">suggest next experiment</button>`;
      this.byId("ask").onclick = async () => {
        try {
          await this.client.suggest(id);
          await this.refresh(id);
        } catch (err) {
          this.showToast(err);
        }
      };
    }

    this.byId("incumbent-chart").innerHTML = incumbentChartSvg(view.incumbentSeries);
    const section = this.byId("decision-section");
    if (view.showDecisionPath) {
      section.classList.remove("hidden");
      this.byId("decision-chart").innerHTML = decisionPathSvg(view.lanes);
    } else {
      section.classList.add("hidden");
    }

    this.byId("initial-list").innerHTML = view.remainingInitial.length
      ? view.remainingInitial
          .map(
            (p, i) => `<div class="initial-row">
              <code>${escapeHtml(JSON.stringify(p))}</code>
              <input data-init="${i}" placeholder="y" size="8">
              <button data-tell-init="${i}">tell</button>
            </div>`
          )
          .join("")
      : "<em>initial design complete</em>";
    this.root.querySelectorAll<HTMLButtonElement>("button[data-tell-init]").forEach((btn) => {
      btn.onclick = async () => {
        const i = Number(btn.dataset.tellInit);
        const input = this.root.querySelector<HTMLInputElement>(`input[data-init="${i}"]`)!;
        const y = Number(input.value);
        if (!Number.isFinite(y)) {
          this.showToast(new Error("y must be a finite number"));
          return;
        }
        try {
          await this.client.tell(id, view.remainingInitial[i], y);
          await this.refresh(id);
        } catch (err) {
          this.showToast(err);
        }
      };
    });

    const tbody = this.root.querySelector("#history-table tbody")!;
    tbody.innerHTML = view.historyRows
      .map(
        (r) =>
          `<tr><td>${r.iteration}</td><td>${escapeHtml(r.label)}</td><td>${r.y}</td><td>${r.tag}</td></tr>`
      )
      .join("");
    (this.byId("acq-kind") as HTMLSelectElement).value = view.acq.kind;
  }

  private showToast(err: unknown): void {
    const toast = this.byId("toast");
    toast.textContent = err instanceof ApiError ? `${err.status}: ${err.detail}` : String(err);
    toast.classList.remove("hidden");
    window.setTimeout(() => toast.classList.add("hidden"), 4000);
  }

  private byId(id: string): HTMLElement {
    return document.getElementById(id)!;
  }
}

function escapeHtml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function escapeAttr(text: string): string {
  return escapeHtml(text).replace(/"/g, "&quot;");
}
