import assert from "node:assert/strict";
import { test } from "node:test";

import { Record } from "../src/csv.js";
import { canonicalEstimator, filterCells } from "../src/data.js";
import { renderErrorScatter, renderNmseBars, renderSeVsSnr } from "../src/figures.js";
import { NoRowsError, Summary, SummaryCell } from "../src/schema.js";

function makeCell(overrides: Partial<SummaryCell>): SummaryCell {
    return {
        model: "weichselberger",
        estimator: "SC_GPR",
        delta: 2,
        pilot_len: 18,
        pilot_saving_pct: 50,
        snr_db: 0,
        trials: 20,
        nmse_db: -14.5,
        se_true_mean: 30,
        se_est_mean: 28,
        se_est_ci95: 0.5,
        relative_se_mean: 0.93,
        coverage: 0.95,
        area95: 0.123456789,
        axis_ratio: 1.1,
        err_cov: [
            [0.02, 0.001],
            [0.001, 0.018],
        ],
        n_error_samples: 1000,
        ...overrides,
    };
}

const summary: Summary = {
    schema_version: 1,
    cells: [
        makeCell({ snr_db: -10, se_est_mean: 10, se_true_mean: 12, nmse_db: -8 }),
        makeCell({ snr_db: 0 }),
        makeCell({ snr_db: 10, se_est_mean: 40, se_true_mean: 44, nmse_db: -20 }),
        makeCell({ estimator: "LS", delta: null, pilot_len: 36, pilot_saving_pct: 0, snr_db: 0, nmse_db: 0.1 }),
        makeCell({ estimator: "LS", delta: null, pilot_len: 36, pilot_saving_pct: 0, snr_db: -10, se_est_mean: 4 }),
        makeCell({ estimator: "LS", delta: null, pilot_len: 36, pilot_saving_pct: 0, snr_db: 10, se_est_mean: 20 }),
    ],
};

const errorRecords: Record[] = [];
for (let i = 0; i < 50; i += 1) {
    errorRecords.push({
        model: "weichselberger",
        estimator: "SC_GPR",
        delta: "2",
        snr_db: "0.0",
        trial: "0",
        re_err: String(0.01 * Math.sin(i)),
        im_err: String(0.01 * Math.cos(i)),
    });
}

test("estimator aliases canonicalize", () => {
    assert.equal(canonicalEstimator("SC"), "SC_GPR");
    assert.equal(canonicalEstimator("mmse"), "MMSE_FULL");
    assert.equal(canonicalEstimator("LS"), "LS");
    assert.equal(canonicalEstimator("TRUE"), "TRUE");
});

test("model filter matches prefixes case-insensitively", () => {
    const cells = filterCells(summary.cells, { model: "W" });
    assert.equal(cells.length, summary.cells.length);
    assert.deepEqual(filterCells(summary.cells, { model: "kron" }), []);
});

test("error scatter embeds the summary area in the ellipse annotation", () => {
    const svg = renderErrorScatter(errorRecords, summary, {
        model: "W",
        delta: 2,
        estimators: ["SC"],
        snrDb: 0,
    });
    const match = svg.match(/data-area95="([^"]+)"/);
    assert.ok(match, "ellipse annotation present");
    assert.equal(Number(match![1]), 0.123456789);
    assert.ok(svg.includes("50% saving"));
});

test("error scatter with empty filters raises the no-rows error", () => {
    assert.throws(
        () => renderErrorScatter(errorRecords, summary, { model: "kron" }),
        NoRowsError,
    );
});

test("se-vs-snr renders one curve per selection plus the true-CSI curve", () => {
    const svg = renderSeVsSnr(summary, { estimators: ["SC", "LS", "TRUE"] });
    const series = [...svg.matchAll(/data-series="([^"]+)"/g)].map((m) => m[1]);
    assert.ok(series.includes("SC_GPR|2"));
    assert.ok(series.includes("LS|"));
    assert.ok(series.includes("TRUE"));
    const trueLine = svg.match(/data-series="TRUE"[^>]*data-y="([^"]+)"/) ??
        svg.match(/data-y="([^"]+)"[^>]*data-series="TRUE"/);
    assert.ok(trueLine, "true-CSI curve present");
    const ys = trueLine![1].split(";").map(Number);
    for (let i = 1; i < ys.length; i += 1) {
        assert.ok(ys[i] >= ys[i - 1], "perfect-CSI SE grows with SNR");
    }
});

test("nmse bars pick the 0 dB anchor and annotate values", () => {
    const svg = renderNmseBars(summary, { estimators: ["SC", "LS"] });
    assert.ok(svg.includes('data-nmse-db="-14.5"'));
    assert.ok(svg.includes('data-nmse-db="0.1"'));
});

test("rendering is pure: identical inputs give identical bytes", () => {
    const a = renderSeVsSnr(summary, { estimators: ["SC", "TRUE"] });
    const b = renderSeVsSnr(summary, { estimators: ["SC", "TRUE"] });
    assert.equal(a, b);
});
