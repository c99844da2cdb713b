import init, { explore, solve_tree, sweep } from "./pkg/replica_web.js";

const $ = (id) => document.getElementById(id);
const SVG = "http://www.w3.org/2000/svg";

function svgEl(name, attrs, text) {
  const el = document.createElementNS(SVG, name);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  if (text !== undefined) el.textContent = text;
  return el;
}

function call(fn, ...args) {
  const out = JSON.parse(fn(...args));
  if (out.error) throw new Error(out.error);
  return out;
}

function showError(target, e) {
  target.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = e.message;
  target.appendChild(p);
}

// Parses the text format just enough to lay the tree out.
function parseTree(text) {
  const nodes = [];
  for (const raw of text.split("\n")) {
    const line = raw.split("#")[0].trim();
    if (!line) continue;
    const f = line.split(/\s+/);
    const parentAt = f.indexOf("parent");
    const parent = parentAt >= 0 ? f[parentAt + 1] : null;
    if (f[0] === "client") {
      nodes.push({ id: f[1], parent, client: true, requests: Number(f[f.indexOf("requests") + 1]) });
    } else if (f[0] === "node") {
      nodes.push({ id: f[1], parent, client: false, capacity: Number(f[2]) });
    }
  }
  return nodes;
}

function layout(nodes) {
  const children = new Map(nodes.map((n) => [n.id, []]));
  let root = null;
  for (const n of nodes) {
    if (n.parent === null) root = n.id;
    else children.get(n.parent)?.push(n.id);
  }
  const pos = new Map();
  let next = 0;
  let depthMax = 0;
  const visit = (id, depth) => {
    depthMax = Math.max(depthMax, depth);
    const kids = children.get(id);
    if (kids.length === 0) {
      pos.set(id, { x: next++, depth });
      return;
    }
    // Internal children first so client leaves hang at the edges.
    kids.forEach((k) => visit(k, depth + 1));
    const xs = kids.map((k) => pos.get(k).x);
    pos.set(id, { x: (Math.min(...xs) + Math.max(...xs)) / 2, depth });
  };
  if (root !== null) visit(root, 0);
  return { pos, leaves: Math.max(next, 1), depthMax };
}

function drawTree(nodes, solution) {
  const svg = $("tree-svg");
  svg.innerHTML = "";
  const { pos, leaves, depthMax } = layout(nodes);
  const width = svg.clientWidth || 1000;
  const height = Math.max(160, 70 * (depthMax + 1));
  svg.setAttribute("height", height);
  const px = (id) => 20 + (pos.get(id).x + 0.5) * ((width - 40) / leaves);
  const py = (id) => 24 + pos.get(id).depth * ((height - 48) / Math.max(depthMax, 1));
  const replicas = new Set(solution ? solution.replicas : []);
  const load = new Map(solution ? solution.replicas.map((r, k) => [r, solution.loads[k]]) : []);

  for (const n of nodes) {
    if (n.parent === null) continue;
    svg.appendChild(svgEl("line", { class: "edge", x1: px(n.id), y1: py(n.id), x2: px(n.parent), y2: py(n.parent) }));
  }
  if (solution) {
    for (const t of solution.assignment) {
      const [x1, y1, x2, y2] = [px(t.client), py(t.client), px(t.server), py(t.server)];
      const bend = Math.min(40, Math.abs(y1 - y2) / 3);
      const path = svgEl("path", { class: "served", d: `M${x1},${y1} C${x1 + bend},${y1} ${x2 + bend},${y2} ${x2},${y2}` });
      path.appendChild(svgEl("title", {}, `${t.client} → ${t.server}: ${t.amount}`));
      svg.appendChild(path);
    }
  }
  for (const n of nodes) {
    const [x, y] = [px(n.id), py(n.id)];
    const g = svgEl("g", {});
    if (n.client) {
      g.appendChild(svgEl("rect", { class: "node-client", x: x - 9, y: y - 7, width: 18, height: 14, rx: 3 }));
      g.appendChild(svgEl("text", { x, y: y + 20, "text-anchor": "middle", "font-size": 10 }, n.requests));
      g.appendChild(svgEl("title", {}, `${n.id}: ${n.requests} requests`));
    } else {
      const on = replicas.has(n.id);
      g.appendChild(svgEl("circle", { class: on ? "node-replica" : "node-internal", cx: x, cy: y, r: 10 }));
      const label = on ? `${load.get(n.id)}/${n.capacity}` : `${n.capacity}`;
      g.appendChild(svgEl("text", { x: x + 13, y: y - 8, "font-size": 10 }, label));
      g.appendChild(svgEl("title", {}, `${n.id}: capacity ${n.capacity}` + (on ? `, load ${load.get(n.id)}` : "")));
    }
    svg.appendChild(g);
  }
}

function generate() {
  try {
    const request = {
      lambda: Number($("lambda").value),
      size_min: Number($("size-min").value),
      size_max: Number($("size-max").value),
      capacity: Number($("cap").value),
      capacity_max: Number($("cap-max").value),
      branching_max: Number($("branching").value),
      seed: Number($("seed").value),
    };
    const view = call(explore, JSON.stringify(request));
    $("tree-text").value = view.text;
    const internal = view.nodes.filter((n) => !n.client).length;
    $("tree-info").textContent =
      `${internal} internal nodes, ${view.nodes.length - internal} clients, ` +
      `${view.total_requests} requests, load ${view.lambda.toFixed(3)}` + (view.homogeneous ? ", equal capacities" : "");
    drawTree(parseTree(view.text), null);
    $("solve-info").textContent = "";
  } catch (e) {
    showError($("tree-info"), e);
  }
}

function solve() {
  const text = $("tree-text").value;
  try {
    const out = call(solve_tree, text, $("algo").value);
    const verdict = out.success
      ? `${out.replicas.length} replicas, cost ${out.cost}, policy ${out.policy}` + (out.valid ? "" : " (INVALID)")
      : `no solution: ${out.residual} requests reach the root unserved`;
    $("solve-info").textContent = `${out.algo}: ${verdict}`;
    drawTree(parseTree(text), out.success ? out : null);
  } catch (e) {
    showError($("solve-info"), e);
  }
}

const COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#000"];

function drawChart(rows) {
  const svg = $("chart");
  svg.innerHTML = "";
  const width = svg.clientWidth || 1000;
  const height = 280;
  const lambdas = [...new Set(rows.map((r) => r.lambda))];
  const names = [...new Set(rows.map((r) => r.heuristic))];
  const [x0, x1, y0, y1] = [50, width - 110, height - 30, 15];
  const sx = (k) => (lambdas.length === 1 ? (x0 + x1) / 2 : x0 + (k * (x1 - x0)) / (lambdas.length - 1));
  const sy = (v) => y0 + v * (y1 - y0);
  svg.appendChild(svgEl("line", { x1: x0, y1: y0, x2: x1, y2: y0, stroke: "#999" }));
  svg.appendChild(svgEl("line", { x1: x0, y1: y0, x2: x0, y2: y1, stroke: "#999" }));
  for (const v of [0, 0.5, 1]) {
    svg.appendChild(svgEl("text", { x: x0 - 8, y: sy(v) + 4, "text-anchor": "end", "font-size": 10 }, v));
  }
  lambdas.forEach((l, k) => svg.appendChild(svgEl("text", { x: sx(k), y: y0 + 16, "text-anchor": "middle", "font-size": 10 }, l)));
  svg.appendChild(svgEl("text", { x: 8, y: 12, "font-size": 10 }, "relative cost"));
  names.forEach((name, i) => {
    const pts = lambdas.map((l, k) => {
      const row = rows.find((r) => r.lambda === l && r.heuristic === name);
      return `${sx(k)},${sy(row.rcost)}`;
    });
    svg.appendChild(svgEl("polyline", { points: pts.join(" "), fill: "none", stroke: COLORS[i % COLORS.length], "stroke-width": name === "MB" ? 3 : 1.5 }));
    svg.appendChild(svgEl("text", { x: x1 + 10, y: y1 + 12 + i * 14, fill: COLORS[i % COLORS.length], "font-size": 11 }, name));
  });
}

function runSweep() {
  $("sweep-info").textContent = "running…";
  // Let the status paint before the synchronous call blocks the page.
  setTimeout(() => {
    try {
      const request = {
        lambdas: $("sweep-lambdas").value.split(",").map(Number).filter((v) => v > 0),
        trees: Number($("sweep-trees").value),
        capacity: Number($("sweep-cap").value),
        seed: Number($("sweep-seed").value),
      };
      const out = call(sweep, JSON.stringify(request));
      $("sweep-info").textContent = "";
      drawChart(out.rows);
      const lambdas = [...new Set(out.rows.map((r) => r.lambda))];
      const names = [...new Set(out.rows.map((r) => r.heuristic))];
      let html = "<table><tr><th>heuristic</th>" + lambdas.map((l) => `<th>λ=${l}</th>`).join("") + "</tr>";
      for (const name of names) {
        html += `<tr><th>${name}</th>`;
        for (const l of lambdas) {
          const r = out.rows.find((x) => x.lambda === l && x.heuristic === name);
          html += `<td>${r.success_pct.toFixed(0)}% / ${r.rcost.toFixed(3)}</td>`;
        }
        html += "</tr>";
      }
      $("sweep-table").innerHTML = html + "</table><p class='note'>success rate / relative cost</p>";
    } catch (e) {
      showError($("sweep-info"), e);
    }
  }, 20);
}

await init();
$("generate").addEventListener("click", generate);
$("solve").addEventListener("click", solve);
$("sweep").addEventListener("click", runSweep);
generate();
solve();
