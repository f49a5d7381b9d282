/** Studio page wiring: profile editor, chart view, job cards, BER compare. */
import { ApiClient } from "./api.js";
import { ProfileEditor, PolySide } from "./editor.js";
import { renderHeatmap } from "./heatmap.js";
import { launchJob, JobWatch } from "./jobs.js";
import { berPlot, exitOverlay } from "./plots.js";
import type { BerTable, ExitCurves, JobKind, Profile, SexitBundle } from "./types.js";

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("service") ?? "http://127.0.0.1:8356");

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

let editor: ProfileEditor | null = null;
let currentName = "";
let chartBundle: SexitBundle | null = null;
let chartCurves: ExitCurves | null = null;
let berTables: { a?: BerTable; b?: BerTable } = {};
const watches: JobWatch[] = [];

// ---- profile editor ---------------------------------------------------------

function defaultProfile(): Profile {
  return {
    perspective: "edge",
    lambda: [{ degree: 3, weight: 1 }],
    rho: [{ degree: 6, weight: 1 }],
  };
}

function renderEditor(): void {
  const host = $("editor");
  host.innerHTML = "";
  if (!editor) return;
  const profile = editor.profile;
  for (const side of ["lambda", "rho"] as PolySide[]) {
    const box = document.createElement("div");
    box.className = "poly";
    const title = document.createElement("h3");
    title.textContent = side === "lambda" ? "λ (variable nodes)" : "ρ (check nodes)";
    box.appendChild(title);
    for (const term of profile[side]) {
      const row = document.createElement("div");
      row.className = "term";
      const deg = document.createElement("input");
      deg.type = "number";
      deg.min = "1";
      deg.value = String(term.degree);
      deg.addEventListener("change", () => {
        act(() => editor!.setDegree(side, term.degree, Number(deg.value)));
      });
      const weight = document.createElement("input");
      weight.type = "number";
      weight.step = "0.001";
      weight.value = String(term.weight);
      weight.addEventListener("change", () => {
        act(() => editor!.setWeight(side, term.degree, Number(weight.value)));
      });
      const del = button("×", () => act(() => editor!.removeTerm(side, term.degree)));
      const reb = button("⇌", () => act(() => editor!.rebalance(side, term.degree)));
      reb.title = "rebalance this degree to restore the target rate";
      row.append(deg, weight, reb, del);
      box.appendChild(row);
    }
    const addRow = document.createElement("div");
    const degIn = document.createElement("input");
    degIn.type = "number";
    degIn.placeholder = "degree";
    addRow.append(
      degIn,
      button("add term", () => act(() => editor!.addTerm(side, Number(degIn.value), 0))),
      button("renormalize", () => act(() => editor!.renormalize(side))),
    );
    box.appendChild(addRow);
    host.appendChild(box);
  }
  const undoBtn = $("undo") as HTMLButtonElement;
  undoBtn.disabled = !editor.canUndo;
  updateRateIndicator();
}

function updateRateIndicator(): void {
  const rateEl = $("rate");
  const violationsEl = $("violations");
  const saveBtn = $("save-profile") as HTMLButtonElement;
  if (!editor) {
    rateEl.textContent = "—";
    violationsEl.textContent = "";
    saveBtn.disabled = true;
    return;
  }
  const rate = editor.rate;
  rateEl.textContent = rate === null ? "invalid" : rate.toFixed(6);
  rateEl.className = rate !== null && Math.abs(rate - editor.targetRate) < 0.005
    ? "rate ok" : "rate off";
  const violations = editor.violations;
  violationsEl.textContent = violations.join("; ");
  saveBtn.disabled = !editor.canSubmit;
}

function act(fn: () => void): void {
  try {
    fn();
    setStatus("");
  } catch (err) {
    setStatus(String(err instanceof Error ? err.message : err));
  }
  renderEditor();
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.addEventListener("click", onClick);
  return b;
}

function setStatus(text: string): void {
  $("status").textContent = text;
}

// ---- chart ------------------------------------------------------------------

function redrawChart(): void {
  const canvas = $("chart") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const showVnd = ($("toggle-vnd") as HTMLInputElement).checked;
  const showCnd = ($("toggle-cnd") as HTMLInputElement).checked;
  const logScale = ($("toggle-log") as HTMLInputElement).checked;
  const replay = ($("toggle-replay") as HTMLInputElement).checked;

  if (chartBundle) {
    const img = renderHeatmap(chartBundle, { showVnd, showCnd, logScale });
    const off = document.createElement("canvas");
    off.width = img.width;
    off.height = img.height;
    const offCtx = off.getContext("2d")!;
    const frame = offCtx.createImageData(img.width, img.height);
    frame.data.set(img.pixels);
    offCtx.putImageData(frame, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
    ($("toggle-vnd") as HTMLInputElement).disabled = !img.vndAvailable;
    ($("toggle-cnd") as HTMLInputElement).disabled = !img.cndAvailable;
  }
  if (replay && chartBundle?.trajectories) {
    ctx.strokeStyle = "rgba(40,40,40,0.5)";
    for (const traj of chartBundle.trajectories.slice(0, 12)) {
      ctx.beginPath();
      let started = false;
      const step = (x: number, y: number) => {
        const px = x * (canvas.width - 1);
        const py = (1 - y) * (canvas.height - 1);
        if (!started) { ctx.moveTo(px, py); started = true; } else ctx.lineTo(px, py);
      };
      const nv = traj.vnd.length;
      for (let i = 0; i < nv; i++) {
        step(traj.vnd[i][0], traj.vnd[i][1]);
        if (traj.cnd[i]) step(traj.cnd[i][0], traj.vnd[i][1]);
      }
      ctx.stroke();
    }
  }
  if (chartCurves) {
    const { vnd, cnd } = exitOverlay(chartCurves, canvas.width, canvas.height);
    for (const [poly, color] of [[vnd, "#1040c0"], [cnd, "#c03030"]] as const) {
      ctx.strokeStyle = color;
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      poly.points.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
      ctx.stroke();
    }
  }
}

async function loadOverlay(): Promise<void> {
  if (!editor || !editor.canSubmit) {
    setStatus("fix the profile before requesting curves");
    return;
  }
  try {
    chartCurves = await api.exitCurves({
      profile: editor.profile,
      channel: readChannel(),
      n_points: 201,
    });
    redrawChart();
  } catch (err) {
    setStatus(`overlay failed: ${err}`);
  }
}

function readChannel(): { kind: "bec" | "biawgn"; param: number } {
  const kind = ($("channel-kind") as HTMLSelectElement).value as "bec" | "biawgn";
  const param = Number(($("channel-param") as HTMLInputElement).value);
  return { kind, param };
}

// ---- jobs -------------------------------------------------------------------

function jobCard(kind: JobKind): HTMLElement {
  const card = document.createElement("div");
  card.className = "job-card";
  card.innerHTML = `<span class="kind">${kind}</span>
    <progress max="1" value="0"></progress>
    <span class="state">queued</span>`;
  const cancelBtn = button("cancel", () => undefined);
  card.appendChild(cancelBtn);
  $("jobs").prepend(card);
  return card;
}

async function launch(kind: JobKind, params: Record<string, unknown>,
                      onDone: (id: string) => Promise<void>): Promise<void> {
  const card = jobCard(kind);
  const bar = card.querySelector("progress")!;
  const state = card.querySelector(".state")!;
  try {
    const watch = await launchJob(api, kind, params, (s) => {
      if (!s.connected) {
        state.textContent = `reconnecting (${s.attempts})`;
        return;
      }
      if (s.job) {
        bar.value = s.job.progress;
        state.textContent = s.job.status + (s.job.error ? `: ${s.job.error}` : "");
      }
    });
    watches.push(watch);
    card.querySelector("button")!.addEventListener("click", () => {
      watch.cancel().catch((err) => setStatus(`cancel failed: ${err}`));
    });
    const job = await watch.done;
    if (job.status === "done") {
      await onDone(job.id);
    }
  } catch (err) {
    state.textContent = `failed: ${err}`;
  }
}

function commonJobParams(): Record<string, unknown> {
  if (!editor || !editor.canSubmit) throw new Error("profile is invalid");
  return {
    profile: editor.profile,
    n: Number(($("job-n") as HTMLInputElement).value),
    channel: readChannel(),
    seed: Number(($("job-seed") as HTMLInputElement).value),
  };
}

async function onSexitDone(id: string): Promise<void> {
  chartBundle = await api.bundleResult(id);
  redrawChart();
}

function drawBerPanel(): void {
  const canvas = $("ber-canvas") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  const colors = { a: "#1040c0", b: "#c03030" } as const;
  for (const slot of ["a", "b"] as const) {
    const table = berTables[slot];
    if (!table) continue;
    const geom = berPlot(table.rows, canvas.width, canvas.height);
    ctx.strokeStyle = colors[slot];
    ctx.fillStyle = colors[slot] + "30";
    if (geom.band.length) {
      ctx.beginPath();
      geom.band.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
      ctx.closePath();
      ctx.fill();
    }
    ctx.beginPath();
    geom.line.points.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
    ctx.stroke();
    for (const m of geom.markers) {
      ctx.beginPath();
      ctx.arc(m.x, m.y, 3.5, 0, 2 * Math.PI);
      if (m.hollow) {
        ctx.stroke();  // under-sampled point drawn hollow
      } else {
        ctx.fillStyle = colors[slot];
        ctx.fill();
      }
    }
  }
  updateGainReadout();
}

async function updateGainReadout(): Promise<void> {
  const el = $("gain");
  if (!berTables.a || !berTables.b) {
    el.textContent = "load two tables to compare";
    return;
  }
  try {
    const target = Number(($("gain-target") as HTMLInputElement).value);
    const gain = await fetchGain(target);
    el.textContent = `gain of B over A at BER ${target}: ${gain.toFixed(3)}`;
  } catch (err) {
    el.textContent = `gain unavailable: ${err}`;
  }
}

let berJobIds: { a?: string; b?: string } = {};

async function fetchGain(target: number): Promise<number> {
  const { a, b } = berJobIds;
  if (!a || !b) throw new Error("need two finished BER jobs");
  const resp = await fetch(`${api.base}/analytic/ber_gain`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ job_a: a, job_b: b, target }),
  });
  if (!resp.ok) throw new Error((await resp.json()).detail ?? resp.statusText);
  return (await resp.json()).gain;
}

// ---- bootstrap ----------------------------------------------------------------

async function refreshProfileList(): Promise<void> {
  const sel = $("profile-list") as HTMLSelectElement;
  sel.innerHTML = "";
  try {
    const { profiles } = await api.listProfiles();
    for (const p of profiles) {
      const opt = document.createElement("option");
      opt.value = p.name;
      opt.textContent = `${p.name} (R=${p.design_rate.toFixed(4)})`;
      sel.appendChild(opt);
    }
  } catch (err) {
    setStatus(`service unreachable: ${err}`);
  }
}

function wire(): void {
  editor = new ProfileEditor(defaultProfile());
  renderEditor();
  $("undo").addEventListener("click", () => act(() => void editor!.undo()));
  $("new-profile").addEventListener("click", () => {
    editor = new ProfileEditor(defaultProfile());
    renderEditor();
  });
  $("load-profile").addEventListener("click", async () => {
    const sel = $("profile-list") as HTMLSelectElement;
    if (!sel.value) return;
    try {
      const out = await api.getProfile(sel.value);
      currentName = out.name;
      editor = new ProfileEditor(out.profile);
      const local = editor.rate;
      if (local !== null && Math.abs(local - out.design_rate) > 1e-6) {
        setStatus(`rate mismatch vs service: ${local} != ${out.design_rate}`);
      }
      ($("profile-name") as HTMLInputElement).value = currentName;
      renderEditor();
    } catch (err) {
      setStatus(`load failed: ${err}`);
    }
  });
  $("save-profile").addEventListener("click", async () => {
    const name = ($("profile-name") as HTMLInputElement).value.trim();
    if (!editor || !name) return;
    try {
      await api.saveProfile(name, editor.profile);
      await refreshProfileList();
      setStatus(`saved ${name}`);
    } catch (err) {
      setStatus(`save failed: ${err}`);
    }
  });
  $("delete-profile").addEventListener("click", async () => {
    const sel = $("profile-list") as HTMLSelectElement;
    if (!sel.value) return;
    try {
      await api.deleteProfile(sel.value);
      await refreshProfileList();
    } catch (err) {
      setStatus(`delete failed: ${err}`);
    }
  });
  $("overlay-btn").addEventListener("click", () => void loadOverlay());
  for (const id of ["toggle-vnd", "toggle-cnd", "toggle-log", "toggle-replay"]) {
    $(id).addEventListener("change", redrawChart);
  }
  $("run-sexit").addEventListener("click", () => {
    try {
      const p = {
        ...commonJobParams(),
        m: Number(($("job-m") as HTMLInputElement).value),
        n_grid: 200,
      };
      void launch("sexit", p, onSexitDone);
    } catch (err) {
      setStatus(String(err));
    }
  });
  $("run-indep").addEventListener("click", () => {
    try {
      void launch("sexit_independent", { ...commonJobParams(), n_grid: 200 }, onSexitDone);
    } catch (err) {
      setStatus(String(err));
    }
  });
  for (const slot of ["a", "b"] as const) {
    $(`run-ber-${slot}`).addEventListener("click", () => {
      try {
        const pts = (($("ber-points") as HTMLInputElement).value)
          .split(",").map(Number).filter((v) => !Number.isNaN(v));
        const base = commonJobParams();
        const p = {
          profile: base.profile, n: base.n, seed: base.seed,
          channel_kind: readChannel().kind, points: pts,
          min_bit_errors: Number(($("ber-errors") as HTMLInputElement).value),
          max_frames: Number(($("ber-frames") as HTMLInputElement).value),
        };
        void launch("ber", p, async (id) => {
          berTables[slot] = await api.berResult(id);
          berJobIds[slot] = id;
          drawBerPanel();
        });
      } catch (err) {
        setStatus(String(err));
      }
    });
  }
  $("gain-target").addEventListener("change", drawBerPanel);
  void refreshProfileList();
}

wire();
