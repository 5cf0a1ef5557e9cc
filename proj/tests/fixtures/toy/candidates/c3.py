def add(a, b):
    return a + b  # add two numbers
#!fail:NameError
