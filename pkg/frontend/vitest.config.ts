import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    // the integration suite builds a metric store through the CLI and boots a
    // real API server in beforeAll, which dominates the hook budget
    testTimeout: 30_000,
    hookTimeout: 180_000,
  },
});
