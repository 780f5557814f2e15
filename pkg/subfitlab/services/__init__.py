"""Services package: order theory, envelopes, duality and the cofinite counterexample."""
