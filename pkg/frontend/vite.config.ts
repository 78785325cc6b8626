import { defineConfig } from 'vitest/config';

// dev server proxies API calls to a locally running `insideout serve`;
// the built bundle expects to be served behind the same origin
export default defineConfig({
  server: {
    proxy: {
      '/api': {
        target: process.env.INSIDEOUT_API ?? 'http://127.0.0.1:8000',
        changeOrigin: true,
      },
    },
  },
  build: {
    outDir: 'dist',
    sourcemap: true,
  },
  test: {
    environment: 'jsdom',
    include: ['tests/**/*.test.ts'],
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
