from musr_tomography.cli import main

main()
