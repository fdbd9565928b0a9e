#!/usr/bin/env node
// render --csv <path> --kind <figure kind> --out <path> [--series k1,k2,...]

import { FigureKind } from "./figures.js"
import { renderFigureFile } from "./render.js"

const KINDS: FigureKind[] = ["udof_vs_k", "cl_vs_k", "rmse_vs_snr", "rmse_vs_u1"]

function usage(): never {
    console.error(
        "usage: render --csv <path> --kind <udof_vs_k|cl_vs_k|rmse_vs_snr|rmse_vs_u1> " +
        "--out <path> [--series k1,k2,...]")
    process.exit(2)
}

function parseArgs(argv: string[]): { csv: string, kind: FigureKind, out: string, series?: string[] } {
    const args = argv[0] === "render" ? argv.slice(1) : argv
    const flags = new Map<string, string>()
    for (let i = 0; i < args.length; i += 2) {
        if (!args[i].startsWith("--") || i + 1 >= args.length) usage()
        flags.set(args[i].slice(2), args[i + 1])
    }
    const csv = flags.get("csv")
    const kind = flags.get("kind") as FigureKind | undefined
    const out = flags.get("out")
    if (!csv || !kind || !out) usage()
    if (!KINDS.includes(kind)) {
        console.error(`unknown figure kind "${kind}"; expected one of ${KINDS.join(", ")}`)
        process.exit(2)
    }
    const seriesFlag = flags.get("series")
    const series = seriesFlag ? seriesFlag.split(",").map(s => s.trim()).filter(Boolean) : undefined
    return { csv, kind, out, series }
}

function main() {
    const options = parseArgs(process.argv.slice(2))
    try {
        const figure = renderFigureFile(options)
        const labels = figure.series.map(s => s.label).join(", ")
        console.log(`wrote ${options.out} (${figure.series.length} series: ${labels})`)
    } catch (error) {
        console.error(`error: ${error instanceof Error ? error.message : error}`)
        process.exit(1)
    }
}

main()
