import { spawn, spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import type { RecommendationDoc } from "../src/types.js";

// Under the jsdom test environment import.meta.url is not a file: URL, so
// locate the repository root by walking up from the working directory
// (npm test always runs from frontend/).
function findRepoRoot(): string {
  let dir = process.cwd();
  for (let hop = 0; hop < 6; hop++) {
    if (existsSync(join(dir, "tests", "fixtures", "input")) && existsSync(join(dir, "frontend"))) {
      return dir;
    }
    const parent = dirname(dir);
    if (parent === dir) break;
    dir = parent;
  }
  throw new Error(`repository root not found above ${process.cwd()}`);
}

export const REPO_ROOT = findRepoRoot();
export const FIXTURE_INPUT = join(REPO_ROOT, "tests", "fixtures", "input");

/** A Response stand-in with only the surface ApiClient touches. */
export function jsonResponse(body: unknown, status = 200): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: `status ${status}`,
    json: async () => body,
  } as unknown as Response;
}

export function textResponse(text: string, status: number): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: `status ${status}`,
    json: async () => JSON.parse(text) as unknown,
  } as unknown as Response;
}

export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 5000,
  stepMs = 10,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    if (predicate()) return;
    if (Date.now() > deadline) throw new Error("condition not met in time");
    await new Promise((resolve) => setTimeout(resolve, stepMs));
  }
}

/** A promise whose settlement the test controls. */
export interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (reason?: unknown) => void;
}

export function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (reason?: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

function runCli(args: string[]): string {
  const result = spawnSync("langpulse", args, { encoding: "utf8" });
  if (result.error) throw result.error;
  if (result.status !== 0) {
    throw new Error(
      `langpulse ${args.join(" ")} exited ${result.status}\n${result.stdout}${result.stderr}`,
    );
  }
  return result.stdout;
}

/** Run the pipeline over the repository's checked-in fixture dump. */
export function buildFixtureStore(): string {
  const dir = mkdtempSync(join(tmpdir(), "langpulse-dash-"));
  runCli(["clean", "--input-dir", FIXTURE_INPUT, "--output-dir", dir]);
  runCli(["profile", "--output-dir", dir]);
  runCli(["compute-gh", "--output-dir", dir, "--top-k", "4"]);
  runCli(["compute-so", "--output-dir", dir]);
  runCli(["combine", "--output-dir", dir, "--weight", "0.5"]);
  return dir;
}

export interface FixtureServer {
  base: string;
  storeDir: string;
  stop: () => Promise<void>;
}

/** Boot `langpulse serve` over a freshly built fixture store and wait for
 * /api/health to answer. */
export async function startFixtureServer(): Promise<FixtureServer> {
  const storeDir = buildFixtureStore();
  const port = 18100 + (process.pid % 1500);
  const base = `http://127.0.0.1:${port}`;
  const child = spawn(
    "langpulse",
    ["serve", "--output-dir", storeDir, "--bind", `127.0.0.1:${port}`],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let output = "";
  child.stdout.on("data", (chunk: Buffer) => {
    output += chunk.toString();
  });
  child.stderr.on("data", (chunk: Buffer) => {
    output += chunk.toString();
  });

  const deadline = Date.now() + 60_000;
  for (;;) {
    if (child.exitCode !== null) {
      throw new Error(`server exited early (${child.exitCode}):\n${output}`);
    }
    try {
      const response = await fetch(`${base}/api/health`);
      if (response.ok) break;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      child.kill("SIGKILL");
      throw new Error(`server did not come up on ${base}:\n${output}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }

  const stop = async (): Promise<void> => {
    child.kill("SIGTERM");
    await new Promise<void>((resolve) => {
      const fallback = setTimeout(() => {
        child.kill("SIGKILL");
        resolve();
      }, 5000);
      child.once("exit", () => {
        clearTimeout(fallback);
        resolve();
      });
    });
    rmSync(storeDir, { recursive: true, force: true });
  };
  return { base, storeDir, stop };
}

export interface CliRecommendArgs {
  goal: string;
  horizon: string;
  topN?: number;
  category?: string;
}

export interface CliRecommendation {
  doc: RecommendationDoc;
  stdout: string;
}

let cliCallCounter = 0;

/** The CLI's view of the same query: its printed ranking and its JSON doc. */
export function cliRecommend(storeDir: string, args: CliRecommendArgs): CliRecommendation {
  cliCallCounter += 1;
  const outFile = join(storeDir, `cli-recommend-${cliCallCounter}.json`);
  const argv = [
    "recommend",
    "--output-dir",
    storeDir,
    "--goal",
    args.goal,
    "--horizon",
    args.horizon,
    "--out",
    outFile,
  ];
  if (args.topN !== undefined) argv.push("--top-n", String(args.topN));
  if (args.category !== undefined) argv.push("--category", args.category);
  const stdout = runCli(argv);
  const doc = JSON.parse(readFileSync(outFile, "utf8")) as RecommendationDoc;
  return { doc, stdout };
}
