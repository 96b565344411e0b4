/** Deterministic SVG construction: no timestamps, stable number formatting. */

export const PALETTE = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
];

/** Fixed-precision coordinate formatting so output bytes are reproducible. */
export function fmt(x: number): string {
    if (!Number.isFinite(x)) {
        return "0";
    }
    const s = x.toPrecision(8);
    return s.includes(".") || s.includes("e")
        ? s.replace(/\.?0+(e|$)/, "$1")
        : s;
}

export function escapeXml(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

export function tag(
    name: string,
    attrs: { [key: string]: string | number },
    children: string[] = [],
): string {
    const parts = Object.keys(attrs)
        .sort()
        .map((k) => `${k}="${typeof attrs[k] === "number" ? fmt(attrs[k] as number) : escapeXml(String(attrs[k]))}"`);
    const open = `<${name}${parts.length ? " " + parts.join(" ") : ""}`;
    if (children.length === 0) {
        return `${open}/>`;
    }
    return `${open}>${children.join("")}</${name}>`;
}

export interface Scale {
    (value: number): number;
    domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
    const [d0, d1] = domain;
    const [r0, r1] = range;
    const span = d1 - d0 || 1;
    const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
    scale.domain = domain;
    return scale;
}

/** Round-valued axis ticks covering the domain (deterministic). */
export function ticks(domain: [number, number], count = 6): number[] {
    const [lo, hi] = domain;
    if (!(hi > lo)) {
        return [lo];
    }
    const rawStep = (hi - lo) / Math.max(count - 1, 1);
    const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
    const candidates = [1, 2, 2.5, 5, 10].map((m) => m * power);
    const step = candidates.find((c) => c >= rawStep) ?? candidates[candidates.length - 1];
    const start = Math.ceil(lo / step) * step;
    const out: number[] = [];
    for (let v = start; v <= hi + 1e-9 * step; v += step) {
        out.push(Math.abs(v) < step * 1e-9 ? 0 : Number(v.toPrecision(12)));
    }
    return out;
}

export interface EllipseGeometry {
    rMajor: number;
    rMinor: number;
    angleDeg: number;
}

/** 95% ellipse of a 2x2 covariance [[a, b], [b, c]] (chi-square(2) quantile). */
export const CHI2_2_095 = 5.991464547107979;

export function ellipseGeometry(cov: number[][]): EllipseGeometry {
    const [a, b] = [cov[0][0], cov[0][1]];
    const c = cov[1][1];
    const mid = (a + c) / 2;
    const diff = Math.sqrt(((a - c) / 2) ** 2 + b * b);
    const lamMajor = Math.max(mid + diff, 0);
    const lamMinor = Math.max(mid - diff, 0);
    const angle =
        Math.abs(b) < 1e-300 && a >= c ? 0 : Math.atan2(lamMajor - a, b === 0 ? 1e-300 : b);
    return {
        rMajor: Math.sqrt(CHI2_2_095 * lamMajor),
        rMinor: Math.sqrt(CHI2_2_095 * lamMinor),
        angleDeg: (angle * 180) / Math.PI,
    };
}

export function ellipseArea(cov: number[][]): number {
    const det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    return Math.PI * CHI2_2_095 * Math.sqrt(Math.max(det, 0));
}

export interface Frame {
    width: number;
    height: number;
    margin: { top: number; right: number; bottom: number; left: number };
}

export const DEFAULT_FRAME: Frame = {
    width: 720,
    height: 480,
    margin: { top: 48, right: 24, bottom: 56, left: 72 },
};

export function axes(
    frame: Frame,
    x: Scale,
    y: Scale,
    xLabel: string,
    yLabel: string,
): string[] {
    const { width, height, margin } = frame;
    const x0 = margin.left;
    const x1 = width - margin.right;
    const y0 = height - margin.bottom;
    const y1 = margin.top;
    const parts: string[] = [];
    parts.push(tag("line", { x1: x0, y1: y0, x2: x1, y2: y0, stroke: "#333", "stroke-width": 1 }));
    parts.push(tag("line", { x1: x0, y1: y0, x2: x0, y2: y1, stroke: "#333", "stroke-width": 1 }));
    for (const t of ticks(x.domain)) {
        const px = x(t);
        parts.push(tag("line", { x1: px, y1: y0, x2: px, y2: y0 + 5, stroke: "#333", "stroke-width": 1 }));
        parts.push(
            tag("text", { x: px, y: y0 + 20, "text-anchor": "middle", "font-size": 12 }, [escapeXml(String(t))]),
        );
    }
    for (const t of ticks(y.domain)) {
        const py = y(t);
        parts.push(tag("line", { x1: x0 - 5, y1: py, x2: x0, y2: py, stroke: "#333", "stroke-width": 1 }));
        parts.push(
            tag(
                "text",
                { x: x0 - 8, y: py + 4, "text-anchor": "end", "font-size": 12 },
                [escapeXml(String(t))],
            ),
        );
    }
    parts.push(
        tag(
            "text",
            { x: (x0 + x1) / 2, y: height - 12, "text-anchor": "middle", "font-size": 13 },
            [escapeXml(xLabel)],
        ),
    );
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
            [escapeXml(yLabel)],
        ),
    );
    return parts;
}

export function legend(frame: Frame, entries: { label: string; color: string }[]): string[] {
    const x = frame.margin.left + 10;
    const parts: string[] = [];
    entries.forEach((entry, i) => {
        const y = frame.margin.top + 8 + 18 * i;
        parts.push(tag("rect", { x, y: y - 9, width: 12, height: 12, fill: entry.color }));
        parts.push(
            tag("text", { x: x + 18, y, "font-size": 12, "text-anchor": "start" }, [
                escapeXml(entry.label),
            ]),
        );
    });
    return parts;
}

export function document(frame: Frame, title: string, body: string[]): string {
    const head = [
        tag(
            "text",
            {
                x: frame.width / 2,
                y: 24,
                "text-anchor": "middle",
                "font-size": 15,
                "font-weight": "bold",
            },
            [escapeXml(title)],
        ),
    ];
    return [
        `<?xml version="1.0" encoding="UTF-8"?>`,
        `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}" font-family="Helvetica, Arial, sans-serif">`,
        tag("rect", { x: 0, y: 0, width: frame.width, height: frame.height, fill: "#ffffff" }),
        ...head,
        ...body,
        `</svg>`,
        ``,
    ].join("\n");
}
