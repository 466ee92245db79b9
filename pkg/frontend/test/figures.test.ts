import { createHash } from "crypto";
import { mkdtemp, readFile, readdir, writeFile } from "fs/promises";
import { tmpdir } from "os";
import path from "path";
import { describe, expect, it } from "vitest";

import { render } from "../src/figures.js";
import { COLUMNS } from "../src/trace.js";

const FIXTURES = path.join(__dirname, "..", "fixtures");
const CASE1 = path.join(FIXTURES, "case1.csv");
const CASE2 = path.join(FIXTURES, "case2.csv");

async function outdir(): Promise<string> {
  return mkdtemp(path.join(tmpdir(), "plotkit-"));
}

async function expectSvgs(files: string[], names: string[]): Promise<void> {
  expect(files.map((f) => path.basename(f)).sort()).toEqual([...names].sort());
  for (const f of files) {
    const text = await readFile(f, "utf-8");
    expect(text.startsWith("<svg")).toBe(true);
    expect(text.trimEnd().endsWith("</svg>")).toBe(true);
    expect(text).toContain("<polyline");
  }
}

describe("figure sets", () => {
  it("renders four panels for the hover-recovery trace", async () => {
    const dir = await outdir();
    const files = await render({ input: CASE1, set: "case1_panels", outdir: dir });
    await expectSvgs(files, [
      "psi.svg",
      "position.svg",
      "angular_velocity.svg",
      "rotor_thrusts.svg",
    ]);
  });

  it("renders five panels plus the 3D path for the flip mission", async () => {
    const dir = await outdir();
    const panels = await render({ input: CASE2, set: "case2_panels", outdir: dir });
    const pathView = await render({ input: CASE2, set: "path3d", outdir: dir });
    await expectSvgs([...panels, ...pathView], [
      "psi.svg",
      "position.svg",
      "angular_velocity.svg",
      "velocity.svg",
      "body_axis.svg",
      "path.svg",
    ]);
    expect((await readdir(dir)).length).toBe(6);
  });

  it("leaves the input unchanged", async () => {
    const before = createHash("sha256")
      .update(await readFile(CASE1))
      .digest("hex");
    await render({ input: CASE1, set: "case1_panels", outdir: await outdir() });
    const after = createHash("sha256")
      .update(await readFile(CASE1))
      .digest("hex");
    expect(after).toBe(before);
  });

  it("labels altitude as up-positive on the position panel", async () => {
    const dir = await outdir();
    await render({ input: CASE1, set: "case1_panels", outdir: dir });
    const text = await readFile(path.join(dir, "position.svg"), "utf-8");
    expect(text).toContain("altitude (-x3)");
    expect(text).toContain("inertial x3 points down");
  });

  it("rejects a header-only CSV with a clear message", async () => {
    const dir = await outdir();
    const empty = path.join(dir, "empty.csv");
    await writeFile(empty, `# schema_version=1\n${COLUMNS.join(",")}\n`);
    await expect(
      render({ input: empty, set: "case1_panels", outdir: dir }),
    ).rejects.toThrow(/no data rows/);
  });
});
