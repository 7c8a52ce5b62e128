"""Field arithmetic, subset combinatorics, sparse tensors and the T_k family."""
