/* tslint:disable */
/* eslint-disable */

/**
 * Stepwise repertoire evolution against the built-in pseudo-real robot.
 */
export class Evolver {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Archive members as `[x, y, yaw, t_hat, quality]` rows.
     */
    archive(): string;
    /**
     * Genotype of the archive member closest to `(x, y)`, or an empty string.
     */
    nearest_genotype(x: number, y: number): string;
    constructor(seed: number, population: number, transfers: boolean);
    /**
     * Runs `generations` generations and returns the current metrics.
     */
    step(generations: number): string;
}

/**
 * Desired orientation, arc length, ROI membership and selection cell of a point.
 */
export function probe(x: number, y: number): string;

export function random_genotype(seed: number): string;

export function replay(genotype: string, real: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_evolver_free: (a: number, b: number) => void;
    readonly evolver_archive: (a: number) => [number, number];
    readonly evolver_nearest_genotype: (a: number, b: number, c: number) => [number, number];
    readonly evolver_new: (a: number, b: number, c: number) => [number, number, number];
    readonly evolver_step: (a: number, b: number) => [number, number];
    readonly probe: (a: number, b: number) => [number, number];
    readonly random_genotype: (a: number) => [number, number];
    readonly replay: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
