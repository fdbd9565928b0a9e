export interface CsvTable {
    columns: string[]
    rows: Record<string, string>[]
}

/**
 * Parse the simple comma-separated format the benchmark harness emits:
 * one header row, no quoting, and `#`-prefixed comment lines anywhere.
 */
export function parseCsv(text: string): CsvTable {
    const lines = text
        .split(/\r?\n/)
        .map(line => line.trim())
        .filter(line => line.length > 0 && !line.startsWith("#"))
    if (lines.length === 0) {
        throw new Error("CSV has no header row")
    }
    const columns = lines[0].split(",").map(c => c.trim())
    const rows: Record<string, string>[] = []
    for (const line of lines.slice(1)) {
        const cells = line.split(",")
        if (cells.length !== columns.length) {
            throw new Error(
                `CSV row has ${cells.length} cells, expected ${columns.length}: ${line}`)
        }
        const row: Record<string, string> = {}
        columns.forEach((name, i) => { row[name] = cells[i].trim() })
        rows.push(row)
    }
    return { columns, rows }
}
