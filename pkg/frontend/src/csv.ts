/** Minimal RFC-4180 CSV parsing: quoted fields, escaped quotes, CR/LF. */

export function parseCsv(text: string): string[][] {
    const rows: string[][] = [];
    let row: string[] = [];
    let field = "";
    let inQuotes = false;
    let i = 0;
    const pushField = () => {
        row.push(field);
        field = "";
    };
    const pushRow = () => {
        pushField();
        rows.push(row);
        row = [];
    };
    while (i < text.length) {
        const ch = text[i];
        if (inQuotes) {
            if (ch === '"') {
                if (text[i + 1] === '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                inQuotes = false;
                i += 1;
                continue;
            }
            field += ch;
            i += 1;
            continue;
        }
        if (ch === '"') {
            inQuotes = true;
            i += 1;
        } else if (ch === ",") {
            pushField();
            i += 1;
        } else if (ch === "\r") {
            i += text[i + 1] === "\n" ? 2 : 1;
            pushRow();
        } else if (ch === "\n") {
            i += 1;
            pushRow();
        } else {
            field += ch;
            i += 1;
        }
    }
    if (field.length > 0 || row.length > 0) {
        pushRow();
    }
    return rows;
}

export type Record = { [column: string]: string };

export function toRecords(rows: string[][]): { header: string[]; records: Record[] } {
    if (rows.length === 0) {
        throw new Error("empty CSV file");
    }
    const header = rows[0];
    const records = rows.slice(1).map((cells) => {
        const rec: Record = {};
        header.forEach((name, idx) => {
            rec[name] = cells[idx] ?? "";
        });
        return rec;
    });
    return { header, records };
}
