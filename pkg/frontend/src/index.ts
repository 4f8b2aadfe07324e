export { FiggenError, parseCsv, requireColumns } from "./csv.js";
export { ratioColor, RATIO_DOMAIN, SERIES_COLORS } from "./color.js";
export { fmt, linearScale, logScale } from "./scale.js";
export { render } from "./figures.js";
export type { FigureKind, FigureSpec } from "./figures.js";
export { main, parseArgs } from "./cli.js";
