# Test package for pricing-dynamics
