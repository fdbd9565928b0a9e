import { CsvTable } from "./csv.js"

export type FigureKind = "udof_vs_k" | "cl_vs_k" | "rmse_vs_snr" | "rmse_vs_u1"

export interface FigureSpec {
    kind: FigureKind
    /** Array kinds to plot; empty or missing selects every kind in the CSV. */
    seriesFilter?: string[]
}

export interface SeriesPoint {
    x: number
    y: number
}

export interface Series {
    label: string
    points: SeriesPoint[]
}

/** The intermediate representation the renderer draws; tests inspect this. */
export interface FigureData {
    kind: FigureKind
    series: Series[]
    xLabel: string
    yLabel: string
    logY: boolean
    xRange: [number, number]
    yRange: [number, number]
}

interface KindConfig {
    xColumn: string
    yColumn: string
    xLabel: string
    yLabel: string
    logY: boolean
    required: string[]
    /** Keep only rows whose named column equals the value (sweep selector). */
    rowFilter?: { column: string, value: string }
}

const KIND_CONFIG: Record<FigureKind, KindConfig> = {
    udof_vs_k: {
        xColumn: "K", yColumn: "udof_bruteforce",
        xLabel: "number of elements K", yLabel: "uDOF", logY: false,
        required: ["kind", "K", "udof_bruteforce"],
    },
    cl_vs_k: {
        xColumn: "K", yColumn: "cl",
        xLabel: "number of elements K", yLabel: "coupling leakage", logY: false,
        required: ["kind", "K", "cl"],
    },
    rmse_vs_snr: {
        xColumn: "sweep_value", yColumn: "rmse_deg",
        xLabel: "SNR (dB)", yLabel: "RMSE (deg)", logY: true,
        required: ["kind", "sweep_param", "sweep_value", "rmse_deg"],
        rowFilter: { column: "sweep_param", value: "snr_db" },
    },
    rmse_vs_u1: {
        xColumn: "sweep_value", yColumn: "rmse_deg",
        xLabel: "|u1|", yLabel: "RMSE (deg)", logY: true,
        required: ["kind", "sweep_param", "sweep_value", "rmse_deg"],
        rowFilter: { column: "sweep_param", value: "u1_mag" },
    },
}

/**
 * Group CSV rows into one (x, y) series per array kind.  Values are taken
 * verbatim from the CSV; nothing is recomputed here.
 */
export function extractFigure(table: CsvTable, spec: FigureSpec): FigureData {
    const config = KIND_CONFIG[spec.kind]
    if (!config) {
        throw new Error(`unknown figure kind "${spec.kind}"`)
    }
    for (const column of config.required) {
        if (!table.columns.includes(column)) {
            throw new Error(
                `missing column "${column}" for figure kind "${spec.kind}"`)
        }
    }
    let rows = table.rows
    if (config.rowFilter) {
        const { column, value } = config.rowFilter
        rows = rows.filter(row => row[column] === value)
        if (rows.length === 0) {
            throw new Error(
                `no rows with ${column} = ${value} for figure kind "${spec.kind}"`)
        }
    }
    const wanted = spec.seriesFilter ?? []
    const byKind = new Map<string, SeriesPoint[]>()
    for (const row of rows) {
        const label = row["kind"]
        if (wanted.length > 0 && !wanted.includes(label)) continue
        const x = Number(row[config.xColumn])
        const y = Number(row[config.yColumn])
        if (!Number.isFinite(x) || !Number.isFinite(y)) continue
        if (!byKind.has(label)) byKind.set(label, [])
        byKind.get(label)!.push({ x, y })
    }
    const series: Series[] = [...byKind.entries()].map(([label, points]) => ({
        label,
        points: points.slice().sort((a, b) => a.x - b.x),
    }))
    if (series.length === 0) {
        throw new Error(`no plottable rows for figure kind "${spec.kind}"`)
    }
    const xs = series.flatMap(s => s.points.map(p => p.x))
    const ys = series.flatMap(s => s.points.map(p => p.y))
    return {
        kind: spec.kind,
        series,
        xLabel: config.xLabel,
        yLabel: config.yLabel,
        // log axes need strictly positive data; fall back to linear otherwise
        logY: config.logY && Math.min(...ys) > 0,
        xRange: [Math.min(...xs), Math.max(...xs)],
        yRange: [Math.min(...ys), Math.max(...ys)],
    }
}
