/** The three figure renderers: error scatter, SE-vs-SNR curves, NMSE bars. */

import { Record } from "./csv.js";
import { Filters, canonicalEstimator, cellLabel, ensureRows, filterCells, filterRecords } from "./data.js";
import { Summary, SummaryCell } from "./schema.js";
import {
    DEFAULT_FRAME,
    Frame,
    PALETTE,
    Scale,
    axes,
    document,
    ellipseGeometry,
    fmt,
    legend,
    linearScale,
    tag,
    ticks,
} from "./svg.js";

/** Y axis plus baseline only (bar charts label their own x positions). */
function barAxes(frame: Frame, y: Scale, yLabel: string): string[] {
    const x0 = frame.margin.left;
    const x1 = frame.width - frame.margin.right;
    const y0 = frame.height - frame.margin.bottom;
    const y1 = frame.margin.top;
    const parts: string[] = [];
    parts.push(tag("line", { x1: x0, y1: y0, x2: x1, y2: y0, stroke: "#333", "stroke-width": 1 }));
    parts.push(tag("line", { x1: x0, y1: y0, x2: x0, y2: y1, stroke: "#333", "stroke-width": 1 }));
    for (const t of ticks(y.domain)) {
        const py = y(t);
        parts.push(tag("line", { x1: x0 - 5, y1: py, x2: x0, y2: py, stroke: "#333", "stroke-width": 1 }));
        parts.push(
            tag("text", { x: x0 - 8, y: py + 4, "text-anchor": "end", "font-size": 12 }, [String(t)]),
        );
    }
    parts.push(
        tag(
            "text",
            {
                x: 16,
                y: (y0 + y1) / 2,
                "text-anchor": "middle",
                "font-size": 13,
                transform: `rotate(-90 16 ${fmt((y0 + y1) / 2)})`,
            },
            [yLabel],
        ),
    );
    return parts;
}

const MAX_SCATTER_POINTS_PER_SERIES = 1500;

function seriesColor(index: number): string {
    return PALETTE[index % PALETTE.length];
}

function estimatorOrder(a: SummaryCell, b: SummaryCell): number {
    const byName = a.estimator.localeCompare(b.estimator);
    if (byName !== 0) return byName;
    return (a.delta ?? 99) - (b.delta ?? 99);
}

/** Scatter of per-entry complex errors with the pooled 95% credible ellipse. */
export function renderErrorScatter(
    errorRecords: Record[],
    summary: Summary,
    filters: Filters,
): string {
    const records = ensureRows(filterRecords(errorRecords, filters), "the error dump");
    const cells = ensureRows(
        filterCells(summary.cells, filters).filter((c) => c.delta !== null || filters.delta === undefined),
        "the summary",
    ).sort(estimatorOrder);

    const frame = { ...DEFAULT_FRAME, height: 540 };
    const groups = new Map<string, Record[]>();
    for (const rec of records) {
        const key = `${rec.estimator}|${rec.delta}`;
        const bucket = groups.get(key) ?? [];
        if (bucket.length < MAX_SCATTER_POINTS_PER_SERIES) {
            bucket.push(rec);
        }
        groups.set(key, bucket);
    }

    let radius = 0;
    for (const rec of records) {
        radius = Math.max(radius, Math.abs(Number(rec.re_err)), Math.abs(Number(rec.im_err)));
    }
    for (const cell of cells) {
        const geo = ellipseGeometry(cell.err_cov);
        radius = Math.max(radius, geo.rMajor);
    }
    radius *= 1.08;

    const x = linearScale([-radius, radius], [frame.margin.left, frame.width - frame.margin.right]);
    const y = linearScale([-radius, radius], [frame.height - frame.margin.bottom, frame.margin.top]);

    const body: string[] = [];
    body.push(...axes(frame, x, y, "Re(error)", "Im(error)"));

    const legendEntries: { label: string; color: string }[] = [];
    const captions: string[] = [];
    cells.forEach((cell, i) => {
        const color = seriesColor(i);
        const key = `${cell.estimator}|${cell.delta ?? ""}`;
        const pts = groups.get(key) ?? [];
        const circles = pts.map((rec) =>
            tag("circle", {
                cx: x(Number(rec.re_err)),
                cy: y(Number(rec.im_err)),
                r: 1.6,
                fill: color,
                "fill-opacity": "0.35",
            }),
        );
        body.push(tag("g", { "data-series": key }, circles));

        const geo = ellipseGeometry(cell.err_cov);
        const cx = x(0);
        const cy = y(0);
        const sx = Math.abs(x(geo.rMajor) - x(0));
        const sy = Math.abs(y(geo.rMinor) - y(0));
        body.push(
            tag("ellipse", {
                cx,
                cy,
                rx: sx,
                ry: sy,
                fill: "none",
                stroke: color,
                "stroke-width": 2,
                transform: `rotate(${fmt(-geo.angleDeg)} ${fmt(cx)} ${fmt(cy)})`,
                "data-area95": String(cell.area95),
                "data-series": key,
            }),
        );
        legendEntries.push({ label: cellLabel(cell), color });
        captions.push(`Area95 ${cell.estimator}=${String(cell.area95)}`);
    });

    body.push(...legend(frame, legendEntries));
    body.push(
        tag(
            "text",
            {
                x: frame.width / 2,
                y: frame.height - 36,
                "text-anchor": "middle",
                "font-size": 11,
                "data-role": "caption",
            },
            [captions.join("  ")],
        ),
    );
    const model = cells[0].model;
    return document(frame, `Complex error scatter with 95% credible ellipses (${model})`, body);
}

/** Mean spectral efficiency versus SNR, one curve per selection plus true CSI. */
export function renderSeVsSnr(summary: Summary, filters: Filters): string {
    const wantTrue =
        filters.estimators === undefined ||
        filters.estimators.map(canonicalEstimator).includes("TRUE");
    const concrete = filters.estimators
        ?.map(canonicalEstimator)
        .filter((e) => e !== "TRUE");
    const cells = ensureRows(
        filterCells(summary.cells, {
            ...filters,
            estimators: concrete && concrete.length ? concrete : undefined,
        }),
        "the summary",
    );

    const seriesKeys = [...new Set(cells.map((c) => `${c.estimator}|${c.delta ?? ""}`))].sort();
    const snrs = [...new Set(cells.map((c) => c.snr_db))].sort((a, b) => a - b);
    if (snrs.length < 2) {
        throw new Error("SE-vs-SNR needs at least two SNR points in the summary");
    }

    type Series = { key: string; label: string; points: [number, number][] };
    const series: Series[] = [];
    for (const key of seriesKeys) {
        const [estimator, deltaText] = key.split("|");
        const pts: [number, number][] = [];
        let label = key;
        for (const snr of snrs) {
            const cell = cells.find(
                (c) =>
                    c.estimator === estimator &&
                    String(c.delta ?? "") === deltaText &&
                    c.snr_db === snr,
            );
            if (cell && cell.se_est_mean !== null) {
                pts.push([snr, cell.se_est_mean]);
                label = cellLabel(cell);
            }
        }
        series.push({ key, label, points: pts });
    }
    if (wantTrue) {
        const pts: [number, number][] = snrs.map((snr) => {
            const cell = cells.find((c) => c.snr_db === snr && c.se_true_mean !== null);
            return [snr, cell?.se_true_mean ?? 0];
        });
        series.push({ key: "TRUE", label: "TRUE (perfect CSI)", points: pts });
    }

    const frame = DEFAULT_FRAME;
    let seMax = 0;
    for (const s of series) {
        for (const [, v] of s.points) seMax = Math.max(seMax, v);
    }
    const x = linearScale(
        [snrs[0], snrs[snrs.length - 1]],
        [frame.margin.left, frame.width - frame.margin.right],
    );
    const y = linearScale([0, seMax * 1.05], [frame.height - frame.margin.bottom, frame.margin.top]);

    const body: string[] = [];
    body.push(...axes(frame, x, y, "SNR [dB]", "Spectral efficiency [bit/s/Hz]"));
    const legendEntries: { label: string; color: string }[] = [];
    series.forEach((s, i) => {
        const color = s.key === "TRUE" ? "#000000" : seriesColor(i);
        const path = s.points.map(([sx, sy]) => `${fmt(x(sx))},${fmt(y(sy))}`).join(" ");
        body.push(
            tag("polyline", {
                points: path,
                fill: "none",
                stroke: color,
                "stroke-width": 2,
                "data-series": s.key,
                "data-y": s.points.map(([, v]) => String(v)).join(";"),
            }),
        );
        for (const [sx, sy] of s.points) {
            body.push(tag("circle", { cx: x(sx), cy: y(sy), r: 3, fill: color }));
        }
        legendEntries.push({ label: s.label, color });
    });
    body.push(...legend(frame, legendEntries));
    const model = cells[0].model;
    return document(frame, `Spectral efficiency vs SNR (${model})`, body);
}

/** Mean NMSE bars per estimator/stride at one SNR point. */
export function renderNmseBars(summary: Summary, filters: Filters): string {
    let cells = filterCells(summary.cells, filters);
    if (filters.snrDb === undefined) {
        const snrs = [...new Set(cells.map((c) => c.snr_db))].sort((a, b) => a - b);
        const anchor = snrs.includes(0) ? 0 : snrs[0];
        cells = cells.filter((c) => c.snr_db === anchor);
    }
    cells = ensureRows(
        cells.filter((c) => c.nmse_db !== null),
        "the summary",
    ).sort(estimatorOrder);

    const frame = DEFAULT_FRAME;
    const values = cells.map((c) => c.nmse_db as number);
    const lo = Math.min(...values, 0) * 1.1 - 1;
    const hi = Math.max(...values, 0) + 1;
    const y = linearScale([lo, hi], [frame.height - frame.margin.bottom, frame.margin.top]);
    const x0 = frame.margin.left;
    const x1 = frame.width - frame.margin.right;
    const slot = (x1 - x0) / cells.length;
    const barWidth = slot * 0.6;

    const body: string[] = [];
    body.push(...barAxes(frame, y, "NMSE [dB]"));
    const legendEntries: { label: string; color: string }[] = [];
    cells.forEach((cell, i) => {
        const color = seriesColor(i);
        const value = cell.nmse_db as number;
        const cx = x0 + slot * (i + 0.5);
        const top = Math.min(y(0), y(value));
        const height = Math.abs(y(value) - y(0));
        body.push(
            tag("rect", {
                x: cx - barWidth / 2,
                y: top,
                width: barWidth,
                height,
                fill: color,
                "data-series": `${cell.estimator}|${cell.delta ?? ""}`,
                "data-nmse-db": String(value),
            }),
        );
        body.push(
            tag(
                "text",
                { x: cx, y: top - 6, "text-anchor": "middle", "font-size": 11 },
                [`${value.toFixed(2)}`],
            ),
        );
        body.push(
            tag(
                "text",
                {
                    x: cx,
                    y: frame.height - frame.margin.bottom + 18,
                    "text-anchor": "middle",
                    "font-size": 10,
                },
                [
                    cell.delta === null
                        ? cell.estimator
                        : `${cell.estimator} Δ=${cell.delta}`,
                ],
            ),
        );
        legendEntries.push({ label: cellLabel(cell), color });
    });
    body.push(
        tag("line", {
            x1: x0,
            y1: y(0),
            x2: x1,
            y2: y(0),
            stroke: "#888",
            "stroke-dasharray": "4 3",
            "stroke-width": 1,
        }),
    );
    body.push(...legend(frame, legendEntries));
    const model = cells[0].model;
    const snr = cells[0].snr_db;
    return document(frame, `NMSE vs pilot overhead at ${snr} dB (${model})`, body);
}
