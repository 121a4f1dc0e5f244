import init, { model_curves, play, sweep } from "./pkg/gapbench_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
}

function plotModel() {
  const data = JSON.parse(model_curves(num("m-budget"), num("m-tpm"), $("m-p").value, num("m-n")));
  const summary = $("m-summary");
  if (data.error) {
    summary.textContent = data.error;
    summary.className = "bad";
    return;
  }
  summary.className = "";
  const horizons = data.p_list.map((p, i) => `p=${p}: n=${data.horizons[i]}`).join(", ");
  summary.textContent = `Budget cliff at n=${data.cliff}. Success drops below 1/2 at ${horizons}.`;

  const c = $("m-canvas");
  const ctx = c.getContext("2d");
  const pad = 40;
  axes(ctx, c.width, c.height, pad);
  const rows = data.rows;
  const x = (n) => pad + ((n - 1) / Math.max(1, rows.length - 1)) * (c.width - 1.5 * pad);
  const y = (v) => c.height - pad - v * (c.height - 1.5 * pad);

  ctx.fillStyle = "#555";
  ctx.font = "12px sans-serif";
  rows.forEach((r) => ctx.fillText(r.n, x(r.n) - 4, c.height - pad + 14));
  ctx.fillText("P(success)", 4, pad / 2);

  ctx.fillStyle = "rgba(200,0,0,0.08)";
  ctx.fillRect(x(data.cliff) - 6, pad / 2, c.width, c.height - 1.5 * pad);
  ctx.fillStyle = "#b00";
  ctx.fillText("over budget", x(data.cliff) + 4, pad / 2 + 12);

  data.p_list.forEach((p, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.beginPath();
    rows.forEach((r, j) => (j ? ctx.lineTo : ctx.moveTo).call(ctx, x(r.n), y(r.p_success[i])));
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(`p=${p}`, c.width - 110, pad + 16 * i);
  });
}

function drawHanoi(ctx, w, h, s) {
  const disks = s.pegs.flat().length || 1;
  s.pegs.forEach((peg, i) => {
    const cx = (w / 3) * (i + 0.5);
    ctx.fillStyle = "#888";
    ctx.fillRect(cx - 2, 30, 4, h - 50);
    peg.forEach((d, level) => {
      const width = 20 + (d / disks) * (w / 3 - 40);
      ctx.fillStyle = COLORS[d % COLORS.length];
      ctx.fillRect(cx - width / 2, h - 30 - (level + 1) * 14, width, 12);
    });
  });
}

function drawChecker(ctx, w, h, s) {
  const cells = [...s.cells];
  const size = Math.min(60, (w - 20) / cells.length);
  cells.forEach((ch, i) => {
    const x = 10 + i * size;
    ctx.strokeStyle = "#aaa";
    ctx.strokeRect(x, h / 2 - size / 2, size, size);
    if (ch === "_") return;
    ctx.fillStyle = ch === "R" ? "#d62728" : "#1f2f5f";
    ctx.beginPath();
    ctx.arc(x + size / 2, h / 2, size * 0.38, 0, 2 * Math.PI);
    ctx.fill();
  });
}

function drawRiver(ctx, w, h, s) {
  ctx.fillStyle = "#cfe3f7";
  ctx.fillRect(w * 0.35, 0, w * 0.3, h);
  ctx.fillStyle = "#7a5230";
  ctx.fillRect(s.boat === "left" ? w * 0.36 : w * 0.56, h / 2 - 10, w * 0.08, 20);
  ctx.font = "13px monospace";
  const column = (people, x0) =>
    people.forEach((p, i) => {
      ctx.fillStyle = p.startsWith("a") ? "#1f77b4" : "#d62728";
      ctx.fillText(p, x0 + Math.floor(i / 14) * 60, 20 + (i % 14) * 17);
    });
  column(s.left, 10);
  column(s.right, w * 0.67);
}

function drawBlocks(ctx, w, h, s, goal) {
  const draw = (stacks, x0, width, label) => {
    ctx.fillStyle = "#555";
    ctx.fillText(label, x0, 14);
    const col = width / Math.max(1, stacks.length);
    stacks.forEach((stack, i) =>
      stack.forEach((b, level) => {
        const x = x0 + i * col;
        const y = h - 20 - (level + 1) * 22;
        ctx.fillStyle = COLORS[b % COLORS.length];
        ctx.fillRect(x + 2, y, col - 4, 20);
        ctx.fillStyle = "#fff";
        ctx.fillText(b, x + col / 2 - 4, y + 14);
      }),
    );
  };
  ctx.font = "12px sans-serif";
  draw(s.stacks, 10, w * 0.6, "current");
  if (goal) draw(goal, w * 0.68, w * 0.3, "goal");
}

let played = null;

function renderStep() {
  if (!played || !played.states) return;
  const i = num("p-step");
  const c = $("p-canvas");
  const ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  const s = played.states[i];
  const kind = $("p-kind").value;
  if (kind === "hanoi") drawHanoi(ctx, c.width, c.height, s);
  else if (kind === "checker") drawChecker(ctx, c.width, c.height, s);
  else if (kind === "river") drawRiver(ctx, c.width, c.height, s);
  else drawBlocks(ctx, c.width, c.height, s, played.goal);
  const mv = i > 0 && played.moves ? ` after ${played.moves[i - 1]}` : "";
  $("p-label").textContent = `step ${i}/${played.states.length - 1}${mv}`;
}

function loadPlay() {
  played = JSON.parse(play($("p-kind").value, num("p-n"), num("p-k"), BigInt(num("p-seed")), $("p-trace").value));
  const status = $("p-status");
  if (played.error) {
    status.textContent = played.error;
    status.className = "status bad";
    played = null;
    return;
  }
  let text = played.status;
  if (played.first_failure_index != null) text += ` at move ${played.first_failure_index} (${played.failure_reason})`;
  if (played.detail) text += `: ${played.detail}`;
  status.textContent = text;
  status.className = played.status === "Solved" ? "status" : "status bad";
  const slider = $("p-step");
  slider.max = played.states ? played.states.length - 1 : 0;
  slider.value = slider.max;
  renderStep();
}

function runSweep() {
  $("s-out").textContent = "running...";
  setTimeout(() => {
    $("s-out").textContent = sweep(
      $("s-agent").value,
      $("s-kind").value,
      num("s-lo"),
      num("s-hi"),
      num("s-k"),
      num("s-samples"),
      $("s-mode").value,
      BigInt(num("s-seed")),
    );
  }, 0);
}

await init();
$("m-go").onclick = plotModel;
$("p-go").onclick = loadPlay;
$("p-step").oninput = renderStep;
$("s-go").onclick = runSweep;
plotModel();
loadPlay();
