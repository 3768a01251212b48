/* tslint:disable */
/* eslint-disable */

/**
 * Rank-score curves plus the diversity matrix of a score-matrix CSV.
 */
export function analyze_matrix(csv: string): string;

/**
 * The bubble-sort Cayley graph with its properties, for 2 <= n <= 6.
 */
export function bubble_graph(n: number): string;

/**
 * Every subset of size >= 2 fused by all four methods.
 */
export function fuse_matrix(csv: string, normalize: boolean, truth?: string | null): string;

/**
 * Kemeny-Snell distance between two whitespace-separated rank vectors
 * (equal values mean tied items), e.g. "1 2 2 4" vs "2 1 3 4".
 */
export function kemeny_between(a: string, b: string): string;

/**
 * Seeded synthetic score matrix; returns its CSV and the ground-truth item.
 */
export function synthesize_matrix(n_items: number, seed: bigint, noise_scales: string, score_scales: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analyze_matrix: (a: number, b: number) => [number, number, number, number];
    readonly bubble_graph: (a: number) => [number, number, number, number];
    readonly fuse_matrix: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly kemeny_between: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly synthesize_matrix: (a: number, b: bigint, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
