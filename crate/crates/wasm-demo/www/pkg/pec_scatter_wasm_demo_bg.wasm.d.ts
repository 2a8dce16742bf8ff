/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const efieCheck: (a: number, b: number) => [number, number, number];
export const modulus: (a: number) => [number, number, number];
export const sphereCrossSections: (a: number) => [number, number, number, number];
export const spherePattern: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
