/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_evolver_free: (a: number, b: number) => void;
export const evolver_archive: (a: number) => [number, number];
export const evolver_nearest_genotype: (a: number, b: number, c: number) => [number, number];
export const evolver_new: (a: number, b: number, c: number) => [number, number, number];
export const evolver_step: (a: number, b: number) => [number, number];
export const probe: (a: number, b: number) => [number, number];
export const random_genotype: (a: number) => [number, number];
export const replay: (a: number, b: number, c: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
