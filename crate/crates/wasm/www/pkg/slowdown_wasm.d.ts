/* tslint:disable */
/* eslint-disable */

export function detrend(values: Float64Array, bandwidth: number): Float64Array;

export function equilibriaOverM(r: number, m_min: number, m_max: number, n: number): Float64Array;

export function rollingIndicators(residuals: Float64Array, window: number): Float64Array;

export function simulatePath(m: number, r: number, d: number, dt: number, t_max: number, u0: number, seed: number, every: number): Float64Array;

export function warningEvents(residuals: Float64Array, window: number, delta: number, theta_multiplier: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly detrend: (a: number, b: number, c: number) => [number, number, number, number];
    readonly equilibriaOverM: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly rollingIndicators: (a: number, b: number, c: number) => [number, number, number, number];
    readonly simulatePath: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly warningEvents: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
