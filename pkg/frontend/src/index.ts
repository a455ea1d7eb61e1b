export { readTable, numColumn, strColumn, SchemaError, type Table } from "./csv.js";
export { kernelGrid, decayCurve, limitsSeries, occupancyGrid, cylindricGrid } from "./model.js";
export type { KernelGrid, LimitSeries, OccupancyGrid, CylindricGrid } from "./model.js";
export {
  kernelHeatmapFigure,
  spacetimeDecayFigure,
  limitsCurveFigure,
  trajectoryRasterFigure,
  cylindricHeatmapFigure,
  failureBannerFigure,
} from "./plots.js";
export { figureToSvg } from "./svg.js";
export { figureToPng } from "./raster.js";
export { render, PLOT_NAMES, type PlotSpec, type PlotName } from "./render.js";
export { parseArgs, main } from "./cli.js";
