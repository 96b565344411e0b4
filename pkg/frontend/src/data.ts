/** Filtering and selection of experiment rows and summary cells. */

import { Record } from "./csv.js";
import { NoRowsError, SummaryCell } from "./schema.js";

/** Short estimator aliases accepted on the command line. */
const ESTIMATOR_ALIASES: { [alias: string]: string } = {
    SC: "SC_GPR",
    RBF: "RBF_GPR",
    MATERN: "MATERN_GPR",
    RQ: "RQ_GPR",
    LS: "LS",
    MMSE: "MMSE_FULL",
    TRUE: "TRUE",
};

export function canonicalEstimator(name: string): string {
    const upper = name.trim().toUpperCase();
    return ESTIMATOR_ALIASES[upper] ?? upper;
}

export function canonicalModel(name: string): (model: string) => boolean {
    const lower = name.trim().toLowerCase();
    return (model: string) => model.toLowerCase().startsWith(lower);
}

export interface Filters {
    model?: string;
    delta?: number;
    estimators?: string[];
    snrDb?: number;
}

export function filterCells(cells: SummaryCell[], filters: Filters): SummaryCell[] {
    let out = cells;
    if (filters.model !== undefined) {
        const match = canonicalModel(filters.model);
        out = out.filter((c) => match(c.model));
    }
    if (filters.estimators !== undefined) {
        const wanted = new Set(filters.estimators.map(canonicalEstimator));
        out = out.filter((c) => wanted.has(c.estimator));
    }
    if (filters.delta !== undefined) {
        out = out.filter((c) => c.delta === filters.delta || c.delta === null);
    }
    if (filters.snrDb !== undefined) {
        out = out.filter((c) => c.snr_db === filters.snrDb);
    }
    return out;
}

export function filterRecords(records: Record[], filters: Filters): Record[] {
    let out = records;
    if (filters.model !== undefined) {
        const match = canonicalModel(filters.model);
        out = out.filter((r) => match(r.model));
    }
    if (filters.estimators !== undefined) {
        const wanted = new Set(filters.estimators.map(canonicalEstimator));
        out = out.filter((r) => wanted.has(r.estimator));
    }
    if (filters.delta !== undefined) {
        out = out.filter((r) => r.delta === "" || Number(r.delta) === filters.delta);
    }
    if (filters.snrDb !== undefined) {
        out = out.filter((r) => Number(r.snr_db) === filters.snrDb);
    }
    return out;
}

export function ensureRows<T>(rows: T[], what: string): T[] {
    if (rows.length === 0) {
        throw new NoRowsError(`no rows matched ${what}`);
    }
    return rows;
}

/** Legend label: estimator, stride and pilot saving. */
export function cellLabel(cell: SummaryCell): string {
    const delta = cell.delta === null ? "full pilots" : `Δ=${cell.delta}`;
    return `${cell.estimator} (${delta}, ${cell.pilot_saving_pct.toFixed(0)}% saving)`;
}
