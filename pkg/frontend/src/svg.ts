import { FigureData, Series } from "./figures.js"

const WIDTH = 720
const HEIGHT = 480
const MARGIN = { top: 28, right: 20, bottom: 52, left: 72 }

const PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
]

/** Render the extracted figure data as a standalone SVG document. */
export function renderSvg(figure: FigureData): string {
    const plotW = WIDTH - MARGIN.left - MARGIN.right
    const plotH = HEIGHT - MARGIN.top - MARGIN.bottom
    const [xMin, xMax] = pad(figure.xRange[0], figure.xRange[1], false)
    const [yMin, yMax] = pad(figure.yRange[0], figure.yRange[1], figure.logY)

    const xScale = (x: number) =>
        MARGIN.left + ((x - xMin) / (xMax - xMin || 1)) * plotW
    const yValue = (y: number) => figure.logY ? Math.log10(y) : y
    const yLo = yValue(yMin)
    const yHi = yValue(yMax)
    const yScale = (y: number) =>
        MARGIN.top + plotH - ((yValue(y) - yLo) / (yHi - yLo || 1)) * plotH

    const parts: string[] = []
    parts.push(
        `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
        `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`)
    parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`)

    // axes
    const x0 = MARGIN.left
    const y0 = MARGIN.top + plotH
    parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0 + plotW}" y2="${y0}" stroke="black"/>`)
    parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="black"/>`)

    for (const tick of linearTicks(xMin, xMax)) {
        const px = xScale(tick)
        parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`)
        parts.push(
            `<text x="${px}" y="${y0 + 18}" text-anchor="middle" class="x-tick">` +
            `${formatTick(tick)}</text>`)
    }
    const yTicks = figure.logY ? logTicks(yMin, yMax) : linearTicks(yMin, yMax)
    for (const tick of yTicks) {
        const py = yScale(tick)
        parts.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`)
        parts.push(
            `<line x1="${x0}" y1="${py}" x2="${x0 + plotW}" y2="${py}" ` +
            `stroke="#dddddd" stroke-width="0.5"/>`)
        parts.push(
            `<text x="${x0 - 8}" y="${py + 4}" text-anchor="end" class="y-tick">` +
            `${formatTick(tick)}</text>`)
    }

    parts.push(
        `<text x="${x0 + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle">` +
        `${figure.xLabel}</text>`)
    parts.push(
        `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
        `transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${figure.yLabel}</text>`)

    figure.series.forEach((series, index) => {
        const color = PALETTE[index % PALETTE.length]
        parts.push(seriesPolyline(series, color, xScale, yScale))
        for (const point of series.points) {
            parts.push(
                `<circle cx="${xScale(point.x).toFixed(2)}" cy="${yScale(point.y).toFixed(2)}" ` +
                `r="3" fill="${color}"/>`)
        }
        const legendY = MARGIN.top + 16 * index
        const legendX = MARGIN.left + plotW - 150
        parts.push(
            `<line x1="${legendX}" y1="${legendY}" x2="${legendX + 24}" y2="${legendY}" ` +
            `stroke="${color}" stroke-width="2"/>`)
        parts.push(
            `<text x="${legendX + 30}" y="${legendY + 4}" class="legend">${series.label}</text>`)
    })

    parts.push("</svg>")
    return parts.join("\n") + "\n"
}

function seriesPolyline(
    series: Series,
    color: string,
    xScale: (x: number) => number,
    yScale: (y: number) => number,
): string {
    const points = series.points
        .map(p => `${xScale(p.x).toFixed(2)},${yScale(p.y).toFixed(2)}`)
        .join(" ")
    return `<polyline class="series" data-label="${series.label}" points="${points}" ` +
        `fill="none" stroke="${color}" stroke-width="2"/>`
}

function pad(min: number, max: number, log: boolean): [number, number] {
    if (min === max) {
        return log ? [min / 2, max * 2] : [min - 1, max + 1]
    }
    if (log) {
        return [min / 1.5, max * 1.5]
    }
    const span = max - min
    return [min - 0.05 * span, max + 0.05 * span]
}

function linearTicks(min: number, max: number, count = 6): number[] {
    const rawStep = (max - min) / count
    const magnitude = Math.pow(10, Math.floor(Math.log10(rawStep)))
    const step = [1, 2, 5, 10].map(m => m * magnitude).find(s => (max - min) / s <= count)
        ?? 10 * magnitude
    const ticks: number[] = []
    for (let t = Math.ceil(min / step) * step; t <= max + 1e-9; t += step) {
        ticks.push(Number(t.toFixed(10)))
    }
    return ticks
}

function logTicks(min: number, max: number): number[] {
    const ticks: number[] = []
    for (let e = Math.floor(Math.log10(min)); e <= Math.ceil(Math.log10(max)); e++) {
        const t = Math.pow(10, e)
        if (t >= min / 1.001 && t <= max * 1.001) ticks.push(t)
    }
    if (ticks.length < 2) {
        return [min, max]
    }
    return ticks
}

function formatTick(value: number): string {
    if (value !== 0 && (Math.abs(value) < 1e-3 || Math.abs(value) >= 1e5)) {
        return value.toExponential(0)
    }
    return `${Number(value.toPrecision(6))}`
}
