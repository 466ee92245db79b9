/**
 * Figure sets rendered from trace CSVs.
 *
 * - case1_panels: attitude error, position, angular velocity, rotor thrusts
 * - case2_panels: attitude error, position, angular velocity, velocity,
 *   first body-fixed axis
 * - path3d: isometric 3D flight path
 */

import { createHash } from "crypto";
import { mkdir, readFile, writeFile } from "fs/promises";
import path from "path";

import { PALETTE, linePanel, pathPanel } from "./chart.js";
import { Trace, parseTrace } from "./trace.js";

export const FIGURE_SETS = ["case1_panels", "case2_panels", "path3d"] as const;
export type FigureSet = (typeof FIGURE_SETS)[number];

export interface FigureSpec {
  input: string;
  set: FigureSet;
  outdir: string;
}

interface Panel {
  name: string;
  svg: string;
}

const ALT_NOTE = "inertial x3 points down; altitude shown as -x3 (up)";

function vectorPanel(
  trace: Trace,
  title: string,
  yLabel: string,
  cols: [string, string, string],
  labels: [string, string, string],
  note?: string,
  transform: (v: number) => number = (v) => v,
): string {
  const t = trace.column("t");
  return linePanel({
    title,
    xLabel: "t (s)",
    yLabel,
    x: t,
    note,
    series: cols.map((c, i) => ({
      values: trace.column(c as never).map(transform),
      label: labels[i],
      color: PALETTE[i],
    })),
  });
}

function psiPanel(trace: Trace): Panel {
  const svg = linePanel({
    title: "Attitude error function",
    xLabel: "t (s)",
    yLabel: "Psi",
    x: trace.column("t"),
    yMin: 0,
    series: [{ values: trace.column("Psi"), label: "Psi", color: PALETTE[0] }],
  });
  return { name: "psi.svg", svg };
}

function positionPanel(trace: Trace): Panel {
  const t = trace.column("t");
  const svg = linePanel({
    title: "Position",
    xLabel: "t (s)",
    yLabel: "position (m)",
    x: t,
    note: ALT_NOTE,
    series: [
      { values: trace.column("x1"), label: "x1", color: PALETTE[0] },
      { values: trace.column("x2"), label: "x2", color: PALETTE[1] },
      {
        values: trace.column("x3").map((v) => -v),
        label: "altitude (-x3)",
        color: PALETTE[2],
      },
    ],
  });
  return { name: "position.svg", svg };
}

function buildSet(trace: Trace, set: FigureSet): Panel[] {
  switch (set) {
    case "case1_panels":
      return [
        psiPanel(trace),
        positionPanel(trace),
        {
          name: "angular_velocity.svg",
          svg: vectorPanel(
            trace,
            "Angular velocity",
            "Omega (rad/s)",
            ["W1", "W2", "W3"],
            ["Omega1", "Omega2", "Omega3"],
          ),
        },
        {
          name: "rotor_thrusts.svg",
          svg: linePanel({
            title: "Rotor thrusts",
            xLabel: "t (s)",
            yLabel: "thrust (N)",
            x: trace.column("t"),
            series: (["f1", "f2", "f3", "f4"] as const).map((c, i) => ({
              values: trace.column(c),
              label: c,
              color: PALETTE[i],
            })),
          }),
        },
      ];
    case "case2_panels":
      return [
        psiPanel(trace),
        positionPanel(trace),
        {
          name: "angular_velocity.svg",
          svg: vectorPanel(
            trace,
            "Angular velocity",
            "Omega (rad/s)",
            ["W1", "W2", "W3"],
            ["Omega1", "Omega2", "Omega3"],
          ),
        },
        {
          name: "velocity.svg",
          svg: vectorPanel(
            trace,
            "Velocity",
            "v (m/s)",
            ["v1", "v2", "v3"],
            ["v1", "v2", "v3"],
          ),
        },
        {
          name: "body_axis.svg",
          svg: vectorPanel(
            trace,
            "First body-fixed axis",
            "b1 components",
            ["R11", "R21", "R31"],
            ["b1 . e1", "b1 . e2", "b1 . e3"],
            "first column of the rotation matrix R",
          ),
        },
      ];
    case "path3d":
      return [
        {
          name: "path.svg",
          svg: pathPanel(
            "Flight path",
            trace.column("x1"),
            trace.column("x2"),
            trace.column("x3"),
          ),
        },
      ];
  }
}

/**
 * Render the requested figure set; returns the written file paths.
 *
 * Rendering is read-only with respect to the input CSV; an internal hash
 * check guards against accidental modification.
 */
export async function render(spec: FigureSpec): Promise<string[]> {
  const text = await readFile(spec.input, "utf-8");
  const hashBefore = createHash("sha256").update(text).digest("hex");
  const trace = parseTrace(text);
  const panels = buildSet(trace, spec.set);

  await mkdir(spec.outdir, { recursive: true });
  const written: string[] = [];
  for (const panel of panels) {
    const out = path.join(spec.outdir, panel.name);
    await writeFile(out, panel.svg);
    written.push(out);
  }

  const after = await readFile(spec.input, "utf-8");
  const hashAfter = createHash("sha256").update(after).digest("hex");
  if (hashAfter !== hashBefore) {
    throw new Error(`input modified during rendering: ${spec.input}`);
  }
  return written;
}
