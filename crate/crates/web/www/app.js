import init, { highlight, two_by_two, scenario } from "./pkg/testinj_web.js";

const $ = (id) => document.getElementById(id);

function escape(s) {
  return s.replace(/[&<>"]/g, (c) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" })[c]);
}

function renderNote() {
  const text = $("note").value;
  const r = JSON.parse(highlight(text));
  let html = "";
  let at = 0;
  for (const m of r.matches) {
    if (m.start < at) continue; // overlapping match from another category
    html += escape(text.slice(at, m.start));
    html += `<mark class="${m.category}" title="${m.category}">${escape(text.slice(m.start, m.end))}</mark>`;
    at = m.end;
  }
  $("note-out").innerHTML = html + escape(text.slice(at));
  const counts = Object.entries(r.counts).map(([k, v]) => `${k}: ${v}`).join(", ");
  $("note-counts").textContent = `${r.tokens} tokens; ${counts}`;
}

function renderTable() {
  const n = (id) => Math.max(0, Math.floor(Number($(id).value) || 0));
  try {
    const r = JSON.parse(two_by_two(n("c00"), n("c01"), n("c10"), n("c11"), Number($("t-alpha").value)));
    $("t-out").className = "";
    $("t-out").textContent = r.dof === 0
      ? "An empty row or column: no information, p = 1."
      : `G² = ${r.g2.toFixed(4)} (p = ${r.g2_p.toPrecision(4)}), Pearson χ² = ${r.chi2.toFixed(4)} ` +
        `(p = ${r.chi2_p.toPrecision(4)}), dof ${r.dof} → ${r.independent ? "independent" : "dependent"}`;
  } catch (e) {
    $("t-out").className = "err";
    $("t-out").textContent = String(e);
  }
}

// Demographics on the left, the outcome on the right, everything else between.
function layout(nodes, w, h) {
  const left = ["race", "gender", "age", "is_marginalized"];
  const right = ["is_testinj"];
  const cols = [nodes.filter((v) => left.includes(v)), nodes.filter((v) => !left.includes(v) && !right.includes(v)), nodes.filter((v) => right.includes(v))];
  const pos = {};
  cols.forEach((col, i) => {
    col.forEach((v, j) => {
      pos[v] = { x: 90 + i * (w - 180) / 2, y: (j + 1) * h / (col.length + 1) };
    });
  });
  return pos;
}

function endpoint(ctx, x, y, angle, mark) {
  if (mark === "arrow") {
    ctx.beginPath();
    ctx.moveTo(x, y);
    ctx.lineTo(x - 10 * Math.cos(angle - 0.4), y - 10 * Math.sin(angle - 0.4));
    ctx.lineTo(x - 10 * Math.cos(angle + 0.4), y - 10 * Math.sin(angle + 0.4));
    ctx.closePath();
    ctx.fill();
  } else if (mark === "circle") {
    ctx.beginPath();
    ctx.arc(x - 4 * Math.cos(angle), y - 4 * Math.sin(angle), 4, 0, 2 * Math.PI);
    ctx.fillStyle = "#fff";
    ctx.fill();
    ctx.stroke();
    ctx.fillStyle = "#333";
  }
}

function drawGraph(graph) {
  const canvas = $("s-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pos = layout(graph.nodes, canvas.width, canvas.height);
  const rx = 62, ry = 16;
  ctx.strokeStyle = ctx.fillStyle = "#333";
  ctx.font = "13px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  for (const [a, b, ma, mb] of graph.edges) {
    const p = pos[a], q = pos[b];
    const ang = Math.atan2(q.y - p.y, q.x - p.x);
    // Clip to the ellipse boundary on both ends.
    const clip = (t) => 1 / Math.sqrt((Math.cos(t) / rx) ** 2 + (Math.sin(t) / ry) ** 2);
    const ra = clip(ang), rb = clip(ang);
    const ax = p.x + ra * Math.cos(ang), ay = p.y + ra * Math.sin(ang);
    const bx = q.x - rb * Math.cos(ang), by = q.y - rb * Math.sin(ang);
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
    ctx.stroke();
    endpoint(ctx, bx, by, ang, mb);
    endpoint(ctx, ax, ay, ang + Math.PI, ma);
  }
  for (const v of graph.nodes) {
    const p = pos[v];
    ctx.beginPath();
    ctx.ellipse(p.x, p.y, rx, ry, 0, 0, 2 * Math.PI);
    ctx.fillStyle = "#fff";
    ctx.fill();
    ctx.stroke();
    ctx.fillStyle = "#333";
    ctx.fillText(v, p.x, p.y);
  }
}

function runScenario() {
  $("s-status").className = "";
  $("s-status").textContent = "running…";
  // Let the status paint before the synchronous run blocks the thread.
  setTimeout(() => {
    try {
      const t0 = performance.now();
      const r = JSON.parse(scenario(Number($("s-seed").value), Number($("s-n").value), Number($("s-alpha").value), $("s-alg").value, $("s-coarse").checked));
      const ms = Math.round(performance.now() - t0);
      const conn = Object.entries(r.connected).map(([k, v]) => `${k} ${v ? "connected" : "isolated"}`).join(", ");
      $("s-status").textContent = `${r.graph.edges.length} edges, ${r.tests} tests, ${ms} ms. ${conn}.`;
      $("s-dot").textContent = r.dot;
      drawGraph(r.graph);
    } catch (e) {
      $("s-status").className = "err";
      $("s-status").textContent = String(e);
    }
  }, 10);
}

await init();
$("note").addEventListener("input", renderNote);
for (const id of ["c00", "c01", "c10", "c11", "t-alpha"]) $(id).addEventListener("input", renderTable);
$("s-run").addEventListener("click", runScenario);
renderNote();
renderTable();
runScenario();
