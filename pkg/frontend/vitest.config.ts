import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    setupFiles: ["test/setup.ts"],
    // Argon2id vectors and the live-server flow need more than the default 5s
    testTimeout: 120_000,
    hookTimeout: 60_000,
  },
});
