/* tslint:disable */
/* eslint-disable */

/**
 * Scalar bound curves on `[x_lo, x_hi]` for a given `p`: the two
 * two-sided bounds on `(x^p − 1)/p` and the midpoint bounds.
 */
export function bound_curves(p: number, x_lo: number, x_hi: number, samples: number): string;

/**
 * Margins of every one-parameter catalog case whose hypothesis admits the
 * 2x2 pair `A = [[a11, a12], [a12, a22]]`, `B` likewise, at weight `p`.
 */
export function explore_pair(a11: number, a12: number, a22: number, b11: number, b12: number, b22: number, p: number): string;

/**
 * Eigenvalues of `T_p(A|B)` for `p` on a grid of `[p_lo, p_hi]`, with
 * those of `S(A|B)` for reference.
 */
export function tsallis_sweep(a11: number, a12: number, a22: number, b11: number, b12: number, b22: number, p_lo: number, p_hi: number, steps: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bound_curves: (a: number, b: number, c: number, d: number) => [number, number];
    readonly explore_pair: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly tsallis_sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
