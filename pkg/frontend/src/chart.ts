// Dependency-free SVG bar chart for the intake history views.

import type { SeriesPoint } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function renderBars(container: HTMLElement, points: SeriesPoint[]): void {
  container.innerHTML = "";
  const width = 640;
  const height = 220;
  const pad = 28;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "history-chart");

  if (points.length === 0) {
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", `${width / 2}`);
    text.setAttribute("y", `${height / 2}`);
    text.setAttribute("text-anchor", "middle");
    text.textContent = "no data";
    svg.appendChild(text);
    container.appendChild(svg);
    return;
  }

  const max = Math.max(1, ...points.map((p) => p.total_ml));
  const slot = (width - 2 * pad) / points.length;
  const barWidth = Math.max(2, slot * 0.7);
  points.forEach((p, i) => {
    const barHeight = ((height - 2 * pad) * p.total_ml) / max;
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", `${pad + i * slot + (slot - barWidth) / 2}`);
    rect.setAttribute("y", `${height - pad - barHeight}`);
    rect.setAttribute("width", `${barWidth}`);
    rect.setAttribute("height", `${barHeight}`);
    rect.setAttribute("class", "history-bar");
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${p.label}: ${p.total_ml.toFixed(0)} mL`;
    rect.appendChild(title);
    svg.appendChild(rect);

    // label every bar for short series, every 3rd for the day view
    if (points.length <= 10 || i % 3 === 0) {
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", `${pad + i * slot + slot / 2}`);
      text.setAttribute("y", `${height - pad / 3}`);
      text.setAttribute("text-anchor", "middle");
      text.setAttribute("class", "history-label");
      text.textContent = shortLabel(p.label);
      svg.appendChild(text);
    }
  });
  container.appendChild(svg);
}

function shortLabel(label: string): string {
  // ISO dates shrink to MM-DD; hour buckets and sip timestamps pass through
  return label.length === 10 && label[4] === "-" ? label.slice(5) : label;
}
