import { readFileSync, writeFileSync } from "fs"

import { parseCsv } from "./csv.js"
import { extractFigure, FigureData, FigureKind } from "./figures.js"
import { renderSvg } from "./svg.js"

export interface RenderOptions {
    csv: string
    kind: FigureKind
    out: string
    series?: string[]
}

/**
 * Full pipeline: CSV file -> extracted series -> SVG file.  Returns the
 * intermediate figure data so callers (and tests) can check what was
 * actually plotted without decoding the image.
 */
export function renderFigureFile(options: RenderOptions): FigureData {
    const table = parseCsv(readFileSync(options.csv, "utf8"))
    const figure = extractFigure(table, {
        kind: options.kind,
        seriesFilter: options.series,
    })
    writeFileSync(options.out, renderSvg(figure))
    return figure
}
