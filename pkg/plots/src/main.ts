import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { SchemaError, readTable } from "./csv.js";
import { FIGURE_KINDS, FigureKind, Manifest, readManifest, render } from "./render.js";

export interface Logger {
  error(msg: string): void;
  info(msg: string): void;
}

const CONSOLE: Logger = {
  error: msg => console.error(msg),
  info: msg => console.log(msg),
};

const USAGE =
  "usage: vlcbc-plots render --kind KIND --in CSV [--in CSV ...] " +
  "[--manifest JSON ...] --out IMAGE.svg\n" +
  `  KIND: ${FIGURE_KINDS.join(" | ")}`;

/** CLI body, separated from the process wrapper so tests can call it. */
export function run(argv: string[], log: Logger = CONSOLE): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        kind: { type: "string" },
        in: { type: "string", multiple: true },
        manifest: { type: "string", multiple: true },
        out: { type: "string" },
      },
    });
  } catch (e) {
    log.error(`error: ${(e as Error).message}`);
    log.error(USAGE);
    return 2;
  }
  const { values, positionals } = parsed;

  if (positionals.length !== 1 || positionals[0] !== "render") {
    log.error(USAGE);
    return 2;
  }
  const kind = values.kind as FigureKind | undefined;
  if (kind === undefined || !FIGURE_KINDS.includes(kind)) {
    log.error(`error: --kind must be one of ${FIGURE_KINDS.join(", ")}`);
    return 2;
  }
  const inputs = values.in ?? [];
  if (inputs.length === 0 || !values.out) {
    log.error(USAGE);
    return 2;
  }

  try {
    const tables = inputs.map(p => readTable(p));
    const manifests: Manifest[] = (values.manifest ?? []).map(p => readManifest(p));
    const svg = render(kind, tables, manifests);
    writeFileSync(values.out, svg, "utf-8");
    log.info(`wrote ${values.out}`);
    return 0;
  } catch (e) {
    if (e instanceof SchemaError) {
      log.error(`error: ${e.message}`);
      return 1;
    }
    log.error(`error: ${(e as Error).message}`);
    return 1;
  }
}
