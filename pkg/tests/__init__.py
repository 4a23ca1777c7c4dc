# Test files for the fixed-point process analyzer