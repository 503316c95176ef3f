# Principal fundamental systems: construction and verification
