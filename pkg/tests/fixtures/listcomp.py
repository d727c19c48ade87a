values = [1, 2, 3]
squares = [v * v for v in values]
print(squares)
