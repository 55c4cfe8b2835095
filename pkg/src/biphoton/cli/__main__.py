from .biphoton import main

main()
