/** End-to-end: drive the Python experiment CLI for a 20-trial smoke run,
 * then render every figure kind through this package's CLI and check the
 * acceptance expectations (files render, ellipse caption matches the summary
 * to 1e-9, output bytes are stable, inputs stay untouched).
 */

import assert from "node:assert/strict";
import { execFileSync } from "node:child_process";
import { createHash } from "node:crypto";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { before, test } from "node:test";

import { main } from "../src/cli.js";

const workDir = fs.mkdtempSync(path.join(os.tmpdir(), "gpmimo-figs-"));
const outDir = path.join(workDir, "run");
const results = path.join(outDir, "results.csv");
const summaryPath = path.join(outDir, "summary.json");
const errorsPath = path.join(outDir, "errors.csv");

function sha256(file: string): string {
    return createHash("sha256").update(fs.readFileSync(file)).digest("hex");
}

before(() => {
    execFileSync(
        "python3",
        [
            "-m",
            "gpmimo",
            "run",
            "--shape",
            "24x24",
            "--model",
            "weichselberger",
            "--strides",
            "2,3,4",
            "--snr-db=-10,0,10,20",
            "--trials",
            "20",
            "--estimators",
            "SC_GPR,RQ_GPR,LS,MMSE_FULL",
            "--seed",
            "4242",
            "--fit-iters",
            "25",
            "--dump-errors",
            "--out",
            outDir,
        ],
        { stdio: "pipe", timeout: 900_000 },
    );
});

test("smoke run produced the expected files", () => {
    for (const file of [results, summaryPath, errorsPath, path.join(outDir, "meta.json")]) {
        assert.ok(fs.existsSync(file), `${file} missing`);
    }
});

test("all three figure kinds render with exit code 0", () => {
    const inputHashes = [results, summaryPath, errorsPath].map(sha256);
    for (const [kind, extra] of [
        ["error-scatter", ["--delta", "2", "--estimators", "SC,RQ", "--snr-db", "0"]],
        ["se-vs-snr", ["--estimators", "SC,LS,MMSE,TRUE", "--delta", "2"]],
        ["nmse-bars", ["--estimators", "SC,RQ,LS,MMSE", "--snr-db", "0"]],
    ] as [string, string[]][]) {
        const out = path.join(workDir, `${kind}.svg`);
        const code = main([
            "plot",
            "--kind",
            kind,
            "--in",
            results,
            "--out",
            out,
            "--model",
            "W",
            ...extra,
        ]);
        assert.equal(code, 0, `${kind} failed`);
        const svg = fs.readFileSync(out, "utf-8");
        assert.ok(svg.startsWith("<?xml"), `${kind} is not an SVG`);
        assert.ok(svg.includes("</svg>"), `${kind} truncated`);
    }
    // rendering must not touch its inputs
    assert.deepEqual([results, summaryPath, errorsPath].map(sha256), inputHashes);
});

test("ellipse caption area matches summary.json to 1e-9", () => {
    const out = path.join(workDir, "scatter-check.svg");
    const code = main([
        "plot", "--kind", "error-scatter", "--in", results, "--out", out,
        "--model", "weichselberger", "--delta", "2", "--estimators", "SC,RQ",
        "--snr-db", "0",
    ]);
    assert.equal(code, 0);
    const svg = fs.readFileSync(out, "utf-8");
    const summary = JSON.parse(fs.readFileSync(summaryPath, "utf-8"));
    const annotated = [...svg.matchAll(/data-area95="([^"]+)"[^>]*data-series="([^"]+)"/g)];
    assert.ok(annotated.length >= 2, "expected one ellipse per estimator");
    for (const [, areaText, series] of annotated) {
        const [estimator, deltaText] = series.split("|");
        const cell = summary.cells.find(
            (c: { estimator: string; delta: number | null; snr_db: number }) =>
                c.estimator === estimator &&
                String(c.delta ?? "") === deltaText &&
                c.snr_db === 0,
        );
        assert.ok(cell, `summary cell for ${series} at 0 dB`);
        assert.ok(
            Math.abs(Number(areaText) - cell.area95) <= 1e-9,
            `caption ${areaText} vs summary ${cell.area95}`,
        );
    }
});

test("outputs are byte-stable across repeated invocations", () => {
    for (const kind of ["error-scatter", "se-vs-snr", "nmse-bars"]) {
        const outA = path.join(workDir, `${kind}-a.svg`);
        const outB = path.join(workDir, `${kind}-b.svg`);
        const extra =
            kind === "error-scatter"
                ? ["--delta", "2", "--estimators", "SC,RQ", "--snr-db", "0"]
                : kind === "se-vs-snr"
                  ? ["--estimators", "SC,TRUE", "--delta", "2"]
                  : ["--snr-db", "0"];
        for (const out of [outA, outB]) {
            assert.equal(
                main(["plot", "--kind", kind, "--in", results, "--out", out, ...extra]),
                0,
            );
        }
        assert.ok(
            fs.readFileSync(outA).equals(fs.readFileSync(outB)),
            `${kind} output differs between runs`,
        );
    }
});

test("empty filter selection exits nonzero with a clear message", () => {
    const out = path.join(workDir, "never.svg");
    const code = main([
        "plot", "--kind", "nmse-bars", "--in", results, "--out", out,
        "--model", "kronecker",
    ]);
    assert.equal(code, 2);
    assert.ok(!fs.existsSync(out));
});

test("missing column is reported as a schema error naming the column", () => {
    const broken = path.join(workDir, "broken.csv");
    const lines = fs.readFileSync(results, "utf-8").split("\n");
    const header = lines[0].split(",").filter((c) => c !== "nmse_db");
    fs.writeFileSync(broken, [header.join(","), ...lines.slice(1)].join("\n"));
    const codeHolder: string[] = [];
    const origError = console.error;
    console.error = (msg: string) => codeHolder.push(String(msg));
    let code = -1;
    try {
        code = main([
            "plot", "--kind", "nmse-bars", "--in", broken, "--out",
            path.join(workDir, "broken.svg"), "--summary", summaryPath,
        ]);
    } finally {
        console.error = origError;
    }
    assert.equal(code, 3);
    assert.ok(codeHolder.some((m) => m.includes("missing column: nmse_db")));
});
