/// Numeric tolerances shared by every stage of the compiler.
///
/// The defaults split the working-precision budget between the input gate
/// (`input`, applied to user matrices) and the output target (`reconstruction`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Unitarity / orthogonality / determinant gate applied to inputs.
    pub input: f64,
    /// Eigenphases closer than this are treated as one degenerate cluster.
    pub cluster: f64,
    /// Largest acceptable residual of a Cartan factorization after repair.
    pub factorization: f64,
    /// Largest acceptable distance of a local factor from a tensor product.
    pub product: f64,
    /// Rotations within this of a multiple of 2π are removed by the optimizer.
    pub zero_angle: f64,
    /// Pass/fail threshold for verifying a circuit against its target.
    pub verify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            input: 1e-10,
            cluster: 1e-8,
            factorization: 1e-8,
            product: 1e-9,
            zero_angle: 1e-12,
            verify: 1e-8,
        }
    }
}
