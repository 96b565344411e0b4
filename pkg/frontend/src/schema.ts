/** Column/value schemas of the experiment output files. */

export class SchemaError extends Error {}
export class NoRowsError extends Error {}

export const RESULT_COLUMNS = [
    "schema_version",
    "model",
    "estimator",
    "delta",
    "pilot_len",
    "snr_db",
    "trial",
    "nmse_db",
    "se_true",
    "se_est",
    "relative_se",
    "coverage",
    "area95",
    "axis_ratio",
    "wall_time_ms",
    "jitter_used",
    "error",
] as const;

export const ERROR_COLUMNS = [
    "model",
    "estimator",
    "delta",
    "snr_db",
    "trial",
    "re_err",
    "im_err",
] as const;

export function requireColumns(header: string[], required: readonly string[], file: string): void {
    for (const column of required) {
        if (!header.includes(column)) {
            throw new SchemaError(`${file}: missing column: ${column}`);
        }
    }
}

export interface SummaryCell {
    model: string;
    estimator: string;
    delta: number | null;
    pilot_len: number;
    pilot_saving_pct: number;
    snr_db: number;
    trials: number;
    nmse_db: number | null;
    se_true_mean: number | null;
    se_est_mean: number | null;
    se_est_ci95: number | null;
    relative_se_mean: number | null;
    coverage: number | null;
    area95: number;
    axis_ratio: number | null;
    err_cov: number[][];
    n_error_samples: number;
}

export interface Summary {
    schema_version: number;
    cells: SummaryCell[];
}

const SUMMARY_CELL_KEYS = [
    "model",
    "estimator",
    "delta",
    "pilot_len",
    "pilot_saving_pct",
    "snr_db",
    "nmse_db",
    "se_true_mean",
    "se_est_mean",
    "area95",
    "err_cov",
] as const;

export function parseSummary(text: string, file: string): Summary {
    let data: unknown;
    try {
        data = JSON.parse(text);
    } catch (err) {
        throw new SchemaError(`${file}: not valid JSON (${(err as Error).message})`);
    }
    const summary = data as Summary;
    if (!Array.isArray(summary.cells)) {
        throw new SchemaError(`${file}: missing column: cells`);
    }
    for (const cell of summary.cells) {
        for (const key of SUMMARY_CELL_KEYS) {
            if (!(key in (cell as object))) {
                throw new SchemaError(`${file}: missing column: ${key}`);
            }
        }
    }
    return summary;
}
