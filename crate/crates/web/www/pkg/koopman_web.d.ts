/* tslint:disable */
/* eslint-disable */

/**
 * `‖r_l − mean‖²` for `l = 1..=l_max`, next to the closed form.
 */
export function density_rates(base: string, k: number, m: number, l_max: number): string;

/**
 * Whether `m₁μ_{x₁} ⊗ ⋯ ⊗ m_nμ_{x_n}` is absolutely continuous with respect
 * to the measure of `m₁x₁ ⊕ ⋯ ⊕ m_nx_n`. `coefficients` is `"2, 1"` and
 * `indices` separates the factors with `|`, as in `"1:1 | 1:1 -1:1"`.
 */
export function scaling_constraint(coefficients: string, indices: string, depth: number): string;

/**
 * Support cells of a word such as `"{0 0 ~1}"`, one row of coordinates per
 * cell, with the exact measure as a fraction.
 */
export function word_support(word: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly density_rates: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly scaling_constraint: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly word_support: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
