/** CLI: render experiment outputs to SVG figures.
 *
 * Exit codes: 0 success, 2 no rows matched the filters, 3 schema error,
 * 4 usage error.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { parseCsv, toRecords } from "./csv.js";
import { Filters } from "./data.js";
import { renderErrorScatter, renderNmseBars, renderSeVsSnr } from "./figures.js";
import {
    ERROR_COLUMNS,
    NoRowsError,
    RESULT_COLUMNS,
    SchemaError,
    parseSummary,
    requireColumns,
} from "./schema.js";

const KINDS: { [alias: string]: string } = {
    "error-scatter": "error-scatter",
    errorscatter: "error-scatter",
    scatter: "error-scatter",
    "se-vs-snr": "se-vs-snr",
    sevssnr: "se-vs-snr",
    "nmse-bars": "nmse-bars",
    nmsebars: "nmse-bars",
};

interface CliArgs {
    kind: string;
    input: string;
    output: string;
    summaryPath: string;
    errorsPath: string;
    filters: Filters;
}

export function parseArgs(argv: string[]): CliArgs {
    if (argv[0] !== "plot") {
        throw new UsageError(`unknown command ${argv[0] ?? "(none)"}; expected "plot"`);
    }
    const opts = new Map<string, string>();
    for (let i = 1; i < argv.length; i += 2) {
        const flag = argv[i];
        const value = argv[i + 1];
        if (!flag.startsWith("--") || value === undefined) {
            throw new UsageError(`malformed option ${flag}`);
        }
        opts.set(flag.slice(2), value);
    }
    const kindRaw = (opts.get("kind") ?? "").toLowerCase();
    const kind = KINDS[kindRaw];
    if (!kind) {
        throw new UsageError(`unknown figure kind ${kindRaw || "(none)"}`);
    }
    const input = opts.get("in");
    const output = opts.get("out");
    if (!input || !output) {
        throw new UsageError("--in and --out are required");
    }
    const dir = path.dirname(input);
    const filters: Filters = {};
    if (opts.has("model")) filters.model = opts.get("model");
    if (opts.has("delta")) filters.delta = Number(opts.get("delta"));
    if (opts.has("snr-db")) filters.snrDb = Number(opts.get("snr-db"));
    if (opts.has("estimators")) {
        filters.estimators = (opts.get("estimators") as string).split(",").filter((s) => s.length);
    }
    return {
        kind,
        input,
        output,
        summaryPath: opts.get("summary") ?? path.join(dir, "summary.json"),
        errorsPath: opts.get("errors") ?? path.join(dir, "errors.csv"),
        filters,
    };
}

export class UsageError extends Error {}

function readText(file: string): string {
    if (!fs.existsSync(file)) {
        throw new SchemaError(`${file}: not found`);
    }
    return fs.readFileSync(file, "utf-8");
}

function readResults(file: string): void {
    const { header } = toRecords(parseCsv(readText(file)));
    requireColumns(header, RESULT_COLUMNS, file);
}

export function renderFigure(args: CliArgs): string {
    // the results table is the anchor input: its schema is validated even
    // for figure kinds that draw from the summary
    readResults(args.input);
    const summary = parseSummary(readText(args.summaryPath), args.summaryPath);

    if (args.kind === "error-scatter") {
        if (!fs.existsSync(args.errorsPath)) {
            throw new SchemaError(
                `${args.errorsPath}: not found; rerun the experiment with --dump-errors`,
            );
        }
        const { header, records } = toRecords(parseCsv(readText(args.errorsPath)));
        requireColumns(header, ERROR_COLUMNS, args.errorsPath);
        return renderErrorScatter(records, summary, args.filters);
    }
    if (args.kind === "se-vs-snr") {
        return renderSeVsSnr(summary, args.filters);
    }
    return renderNmseBars(summary, args.filters);
}

export function main(argv: string[]): number {
    let args: CliArgs;
    try {
        args = parseArgs(argv);
    } catch (err) {
        console.error(String((err as Error).message));
        return 4;
    }
    try {
        const svg = renderFigure(args);
        fs.writeFileSync(args.output, svg, "utf-8");
        console.log(`wrote ${args.output}`);
        return 0;
    } catch (err) {
        if (err instanceof NoRowsError) {
            console.error(String(err.message));
            return 2;
        }
        if (err instanceof SchemaError) {
            console.error(String(err.message));
            return 3;
        }
        throw err;
    }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js")) {
    process.exit(main(process.argv.slice(2)));
}
